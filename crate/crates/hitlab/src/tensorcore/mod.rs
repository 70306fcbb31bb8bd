//! Dense tensors, the contraction engine and the exact pairing representation.

pub mod dense;
pub mod doubled;
pub mod engine;
pub mod linalg;
pub mod pairing;

pub use dense::{contract, contract_with, hs_inner, DenseTensor, Dir, Leg};
pub use doubled::{doubled_reduced, network_overlap, network_reduced_density, Network};
pub use engine::{ContractOptions, WireTensor};
pub use linalg::{apply_local, bipartite_entropy, entropy_bits, reduced_density};
pub use pairing::{pairing_entropy, pairing_to_dense, Pair, PairingState};
