use crate::args::{Format, Global};
use crate::CliError;
use serde::Deserialize;
use std::path::PathBuf;

/// Settings from a `--config` file; flags given on the command line win.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    tol: Option<f64>,
    output: Option<PathBuf>,
    format: Option<Format>,
    threads: Option<usize>,
}

/// Resolved global settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: f64,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 7;

impl RunConfig {
    pub fn resolve(g: &Global) -> Result<RunConfig, CliError> {
        let file = match &g.config {
            Some(p) => toml::from_str::<FileConfig>(&std::fs::read_to_string(p)?)?,
            None => FileConfig::default(),
        };
        let env_threads = match std::env::var("HITLAB_THREADS") {
            Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("HITLAB_THREADS must be a positive integer, got {s:?}")))?),
            Err(_) => None,
        };
        let cfg = RunConfig {
            seed: g.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            tol: g.tol.or(file.tol).unwrap_or(hitlab::TOL),
            output: g.output.clone().or(file.output),
            format: g.format.or(file.format),
            threads: env_threads.or(file.threads),
        };
        if !(cfg.tol > 0.0) {
            return Err(CliError::Usage(format!("tolerance must be positive, got {}", cfg.tol)));
        }
        if cfg.threads == Some(0) {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        Ok(cfg)
    }
}
