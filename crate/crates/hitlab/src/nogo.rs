//! Numerical certificates for the symmetry no-go results: sector weights,
//! U(1)/SU(2) invariance, two-uniformity deviation minimisation, the
//! holographic-code exclusion, balanced-bipartition counting and the
//! geometric measure of pair states.

mod bipartition;
mod code;
mod generator;
mod geomeasure;
mod parties;
mod sector;
mod uniform;

pub use bipartition::{balanced_bipartitions, count_mm_balanced_bipartitions, ghz, opposite_bell_pairs, BipartitionCount, MM_TOL};
pub use code::{check_evenbly_code, check_evenbly_state, perfect_tensor, EvenblyReport, CODE_TOL};
pub use generator::{check_u1_invariance, Eigencheck, GeneratorSpec, LocalBasis, Party, Symmetry};
pub(crate) use generator::eigencheck;
pub use geomeasure::{geometric_measure_pairing, max_product_overlap, SingletPairing};
pub use parties::{partial_trace, random_in_subspace, reduced_density_parties, su2_invariant_basis, u1_eigenspaces, TOTAL_DIM_LIMIT};
pub use sector::{sector_weights, SectorDecomposition};
pub use uniform::{
    min_two_uniform_deviation, one_uniform_deviation, party_decoupling_gap, two_uniform_deviation, OptimizeOptions, SubspaceResult,
    TwoUniformCertificate, WITNESS_THRESHOLD,
};
