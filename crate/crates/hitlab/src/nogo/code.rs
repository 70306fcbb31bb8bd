use super::parties::{check_dims, reduced_density_parties, TOTAL_DIM_LIMIT};
use crate::su2kit::total_spin_generators;
use crate::tensorcore::linalg::apply_local;
use crate::tensorcore::{DenseTensor, Dir, Leg};
use crate::{CMatrix, HitError, Result, C64};
use serde::Serialize;

/// Outcome of testing a tensor as a holographic code with one logical leg.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvenblyReport {
    pub logical_leg: usize,
    /// ρ_{0j} ∝ 𝟙 for every physical leg j.
    pub isometry_condition: bool,
    /// max_j ‖ρ_{0j} − 𝟙/(d₀d_j)‖.
    pub isometry_residual: f64,
    pub su2_invariant: bool,
    /// max_a ‖J_a ψ‖ / ‖ψ‖ with J_a the total spin over all slots.
    pub invariance_residual: f64,
    /// Both conditions hold at once, which the no-go rules out.
    pub both: bool,
}

pub const CODE_TOL: f64 = 1e-9;

/// Check the two code conditions on a tensor read as a state over its legs.
pub fn check_evenbly_code(tensor: &DenseTensor, logical_leg: usize) -> Result<EvenblyReport> {
    let dims: Vec<usize> = tensor.legs().iter().map(|l| 1usize << l.k).collect();
    let slots: Vec<usize> = tensor.legs().iter().map(|l| l.k).collect();
    check_state(tensor.data(), &dims, &slots, logical_leg)
}

/// Same check on a state over qubit parties.
pub fn check_evenbly_state(state: &[C64], n: usize, logical_leg: usize) -> Result<EvenblyReport> {
    check_state(state, &vec![2; n], &vec![1; n], logical_leg)
}

fn check_state(state: &[C64], dims: &[usize], slots: &[usize], logical: usize) -> Result<EvenblyReport> {
    check_dims(dims, state.len(), TOTAL_DIM_LIMIT)?;
    if logical >= dims.len() {
        return Err(HitError::Region(format!("logical leg {logical} out of range")));
    }
    if dims.len() < 3 {
        return Err(HitError::Spec("a code needs a logical leg and at least two physical legs".into()));
    }
    let norm = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(HitError::Spec("zero tensor".into()));
    }
    let mut iso: f64 = 0.0;
    for j in (0..dims.len()).filter(|&j| j != logical) {
        let rho = reduced_density_parties(state, dims, &[logical, j])?;
        let d = dims[logical] * dims[j];
        let mm = CMatrix::identity(d, d) / C64::new(d as f64, 0.0);
        iso = iso.max((rho - mm).norm());
    }
    let mut inv: f64 = 0.0;
    let gens: Vec<_> = slots.iter().map(|&k| total_spin_generators(k)).collect();
    for a in 0..3 {
        let mut acc = vec![C64::new(0.0, 0.0); state.len()];
        for (p, g) in gens.iter().enumerate() {
            let v = apply_local(state, dims, p, g.components()[a])?;
            acc.iter_mut().zip(v).for_each(|(x, y)| *x += y);
        }
        inv = inv.max(acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / norm);
    }
    let isometry_condition = iso <= CODE_TOL;
    let su2_invariant = inv <= CODE_TOL;
    Ok(EvenblyReport {
        logical_leg: logical,
        isometry_condition,
        isometry_residual: iso,
        su2_invariant,
        invariance_residual: inv,
        both: isometry_condition && su2_invariant,
    })
}

/// Six-leg perfect tensor of the five-qubit code: leg 0 is logical, legs
/// 1..=5 physical. Built from the cyclic stabilizers XZZXI.
pub fn perfect_tensor() -> DenseTensor {
    let pauli = |c: char, bit: usize| -> (usize, C64) {
        // action on basis bit: (new bit, phase)
        match c {
            'X' => (bit ^ 1, C64::new(1.0, 0.0)),
            'Z' => (bit, C64::new(if bit == 1 { -1.0 } else { 1.0 }, 0.0)),
            _ => (bit, C64::new(1.0, 0.0)),
        }
    };
    let apply = |word: &[char], v: &[C64]| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); 32];
        for (idx, z) in v.iter().enumerate() {
            let mut t = 0;
            let mut ph = *z;
            for (q, &c) in word.iter().enumerate() {
                let bit = (idx >> (4 - q)) & 1;
                let (b, p) = pauli(c, bit);
                t |= b << (4 - q);
                ph *= p;
            }
            out[t] += ph;
        }
        out
    };
    let base = ['X', 'Z', 'Z', 'X', 'I'];
    let stabs: Vec<Vec<char>> = (0..4).map(|s| (0..5).map(|q| base[(q + 5 - s) % 5]).collect()).collect();
    // project |00000⟩ with Π (1 + S)/2
    let mut zero = vec![C64::new(0.0, 0.0); 32];
    zero[0] = C64::new(1.0, 0.0);
    for s in &stabs {
        let sv = apply(s, &zero);
        zero = zero.iter().zip(&sv).map(|(a, b)| (a + b) * 0.5).collect();
    }
    let n = zero.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    zero.iter_mut().for_each(|z| *z /= n);
    let one = apply(&['X'; 5], &zero);
    let mut data = zero;
    data.extend(one);
    data.iter_mut().for_each(|z| *z /= 2f64.sqrt());
    let legs = (0..6).map(|i| Leg::new(i, 1, if i == 0 { Dir::In } else { Dir::Out })).collect();
    DenseTensor::new(legs, data).expect("32·2 amplitudes on six qubit legs")
}
