use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "hitlab", version, about = "SU(2)-invariant hyperinvariant tensor networks on hyperbolic tilings")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Global {
    /// Seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Absolute tolerance for pass/fail checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file (stdout when omitted).
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// TOML file with defaults for seed, tol, output, format and threads.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
    Text,
}

/// Where the vertex tensor comes from.
#[derive(Args, Debug, Clone)]
pub struct SpecSource {
    /// HIT spec JSON file.
    #[arg(long, conflicts_with = "preset")]
    pub spec: Option<PathBuf>,
    /// Built-in family: `star:Q:K`, `left-right:Q`, `l-shift:Q:L1,L2,..`.
    #[arg(long)]
    pub preset: Option<String>,
}

/// Where the tiling comes from.
#[derive(Args, Debug, Clone)]
pub struct TilingSource {
    /// Tiling JSON file written by `hitlab tiling`.
    #[arg(long, conflicts_with_all = ["p", "q", "layers"])]
    pub tiling: Option<PathBuf>,
    #[arg(short, long)]
    pub p: Option<usize>,
    #[arg(short, long)]
    pub q: Option<usize>,
    #[arg(short = 'l', long)]
    pub layers: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a (p,q) tiling patch.
    Tiling {
        #[arg(short, long)]
        p: usize,
        #[arg(short, long)]
        q: usize,
        #[arg(short = 'l', long, default_value_t = 1)]
        layers: usize,
        /// Also draw the patch.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Check cyclic symmetry, SU(2) invariance and the isometry relations.
    Verify {
        #[command(flatten)]
        spec: SpecSource,
        /// Repeat the two-vertex check with a random edge holonomy.
        #[arg(long)]
        holonomy: bool,
    },
    /// Boundary entropies and min-cut lengths.
    Entropy {
        #[command(flatten)]
        tiling: TilingSource,
        #[command(flatten)]
        spec: SpecSource,
        /// `all-contiguous` or a list `start:len,start:len`.
        #[arg(long, default_value = "all-contiguous")]
        regions: String,
    },
    /// Two-point correlators ⟨O(site) O(x)⟩ against every boundary site x.
    Corr {
        #[command(flatten)]
        tiling: TilingSource,
        #[command(flatten)]
        spec: SpecSource,
        /// Observable on each leg: `jz`, `jx`, `casimir`, or `z0` (Pauli z on slot 0).
        #[arg(long, default_value = "jz")]
        obs: String,
        #[arg(long, default_value_t = 0)]
        site: usize,
        /// Dress closed edges with seeded random holonomies.
        #[arg(long)]
        holonomies: bool,
    },
    /// Length operator on the minimal cut of a boundary region.
    Length {
        #[command(flatten)]
        tiling: TilingSource,
        #[command(flatten)]
        spec: SpecSource,
        /// `start:len`; without it the single-edge constants are reported.
        #[arg(long)]
        region: Option<String>,
    },
    /// Spin-network decomposition and vertex area of a three-valent HIT.
    Area {
        #[command(flatten)]
        spec: SpecSource,
    },
    /// Angle between two legs and a polygon's curvature deficit.
    Angle {
        #[command(flatten)]
        spec: SpecSource,
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1])]
        legs: Vec<usize>,
        /// Angles per polygon corner, e.g. `2,2,3`.
        #[arg(long, value_delimiter = ',')]
        pattern: Option<Vec<usize>>,
    },
    /// Numerical certificates for the symmetry no-go results.
    Nogo {
        #[arg(long, value_enum)]
        case: NogoCase,
        /// Party count for two-uniform and evenbly, pair count for bipartitions.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// `su2` or `u1` (total Jz).
        #[arg(long, default_value = "su2")]
        symmetry: String,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        /// Random samples for evenbly and bipartitions.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Shared pairs for geomeasure.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Pair dimension for geomeasure.
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Acceptance suite or the table of headline constants.
    Report {
        #[arg(long, value_enum, default_value_t = Suite::Constants)]
        suite: Suite,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum NogoCase {
    TwoUniform,
    Evenbly,
    Bipartitions,
    Geomeasure,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    #[value(name = "paper-constants")]
    Constants,
    Acceptance,
}
