use super::parties::{check_dims, digits, TOTAL_DIM_LIMIT};
use crate::tensorcore::PairingState;
use crate::{HitError, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Maximally entangled pairs of local dimension `d` shared between parties.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingletPairing {
    pub parties: usize,
    pub d: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl SingletPairing {
    pub fn new(parties: usize, d: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if d < 2 {
            return Err(HitError::Dimension("pair dimension must be at least 2".into()));
        }
        if pairs.iter().any(|&(a, b)| a >= parties || b >= parties) {
            return Err(HitError::Region("pair endpoint out of range".into()));
        }
        Ok(SingletPairing { parties, d, pairs })
    }

    /// Read a qubit pairing state with `slot_party[s]` the party of slot s.
    pub fn from_pairing_state(state: &PairingState, slot_party: &[usize]) -> Result<Self> {
        if slot_party.len() != state.n_slots() {
            return Err(HitError::Dimension(format!("{} slots, {} party labels", state.n_slots(), slot_party.len())));
        }
        let parties = slot_party.iter().max().map_or(0, |m| m + 1);
        let pairs = state.pairs().iter().map(|p| (slot_party[p.a], slot_party[p.b])).collect();
        SingletPairing::new(parties, 2, pairs)
    }

    /// Pairs whose two ends sit on different parties.
    pub fn crossing(&self) -> usize {
        self.pairs.iter().filter(|(a, b)| a != b).count()
    }

    /// Local dimension per party: d to the number of pair ends it holds.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![1usize; self.parties];
        for &(a, b) in &self.pairs {
            dims[a] *= self.d;
            dims[b] *= self.d;
        }
        dims
    }

    /// Dense state, each pair Σ_a |aa⟩/√d, ends laid out in pair order
    /// within each party.
    pub fn to_state(&self) -> Result<(Vec<C64>, Vec<usize>)> {
        let dims = self.dims();
        let total = dims.iter().try_fold(1usize, |a, &x| a.checked_mul(x)).unwrap_or(usize::MAX);
        if total > TOTAL_DIM_LIMIT {
            return Err(HitError::SizeLimit {
                what: "total dimension",
                needed: total,
                limit: TOTAL_DIM_LIMIT,
            });
        }
        // each pair end is a digit of its party's index
        let mut ends: Vec<Vec<usize>> = vec![Vec::new(); self.parties];
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            ends[a].push(i);
            ends[b].push(i);
        }
        let m = self.pairs.len();
        let amp = (self.d as f64).powf(-(m as f64) / 2.0);
        let mut psi = vec![C64::new(0.0, 0.0); total];
        for labels in 0..self.d.pow(m as u32) {
            let lab = digits(labels, &vec![self.d; m]);
            let idx = ends.iter().flatten().fold(0, |x, &e| x * self.d + lab[e]);
            psi[idx] += C64::new(amp, 0.0);
        }
        Ok((psi, dims))
    }
}

/// E_G = 1 − d^{−m} with m the number of pairs crossing parties.
pub fn geometric_measure_pairing(state: &SingletPairing) -> f64 {
    1.0 - (state.d as f64).powi(-(state.crossing() as i32))
}

/// Maximal |⟨φ₁⊗…⊗φ_n|ψ⟩|² over product states, by alternating
/// optimization from seeded random starts.
pub fn max_product_overlap(state: &[C64], dims: &[usize], starts: usize, seed: u64) -> Result<f64> {
    let total = check_dims(dims, state.len(), TOTAL_DIM_LIMIT)?;
    let norm2: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    if norm2 == 0.0 {
        return Err(HitError::Spec("zero state".into()));
    }
    let n = dims.len();
    let idx_digits: Vec<Vec<usize>> = (0..total).map(|i| digits(i, dims)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..starts.max(1) {
        let mut phi: Vec<Vec<C64>> = dims
            .iter()
            .map(|&d| {
                let v: Vec<C64> = (0..d).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
                let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                v.into_iter().map(|z| z / s).collect()
            })
            .collect();
        let mut last = 0.0;
        for _ in 0..500 {
            let mut ov = 0.0;
            for p in 0..n {
                // φ_p ∝ ⟨⊗_{q≠p} φ_q|ψ⟩
                let mut v = vec![C64::new(0.0, 0.0); dims[p]];
                for (i, z) in state.iter().enumerate() {
                    let dg = &idx_digits[i];
                    let w: C64 = (0..n).filter(|&q| q != p).map(|q| phi[q][dg[q]].conj()).product();
                    v[dg[p]] += w * z;
                }
                let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
                if s == 0.0 {
                    break;
                }
                ov = s / norm2;
                phi[p] = v.into_iter().map(|z| z / s.sqrt()).collect();
            }
            if (ov - last).abs() < 1e-15 {
                last = ov;
                break;
            }
            last = ov;
        }
        best = best.max(last);
    }
    Ok(best)
}
