//! Hyperinvariant SU(2)-invariant tensor networks (HITs) on hyperbolic tilings.
//!
//! The crate is organised bottom-up:
//!
//! * [`tiling`] builds vertex-centered patches of (p,q) tilings and computes
//!   minimal cuts, greedy wedges and strips.
//! * [`su2kit`] holds the spin-½ representation machinery (ε pairs,
//!   symmetrizers, total-spin projectors, generators).
//! * [`tensorcore`] provides dense qubit-slot tensors, a wire-label
//!   contraction engine and the exact pairing representation.
//! * [`hit`] constructs vertex/edge tensor pairs and checks their constraints.
//! * [`network`] assembles boundary states on a tiling.
//! * [`geometry`] evaluates length, area and angle observables.
//! * [`nogo`] numerically certifies the impossibility results.
//! * [`report`] runs the acceptance checks and renders the constants table.

pub mod error;
pub mod geometry;
pub mod hit;
pub mod network;
pub mod nogo;
pub mod par;
pub mod report;
pub mod su2kit;
pub mod tensorcore;
pub mod tiling;

pub use error::{HitError, Result};
pub use num_complex::Complex64 as C64;

/// Dense complex matrix used throughout.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Default absolute tolerance for identities.
pub const TOL: f64 = 1e-9;
