use super::parties::{check_dims, partial_trace};
use crate::{CMatrix, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// Hilbert–Schmidt weights of a density matrix split by the number of
/// parties an operator term acts on nontrivially.
///
/// With local bases {𝟙, T_a}, ρ = Σ_S P_S where P_S collects the terms
/// supported exactly on S. `weights[j]` = Σ_{|S|=j} ‖P_S‖², and
/// `weights[0]` = 1/Π d_i is the identity term, so Σ_j weights[j] = tr ρ².
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorDecomposition {
    pub weights: BTreeMap<usize, f64>,
    /// ‖P_S‖² per support set S (sorted party lists).
    pub supports: BTreeMap<Vec<usize>, f64>,
}

impl SectorDecomposition {
    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }
}

/// Sector weights by Möbius inversion of subset purities: the orthogonal
/// part of ρ_S ⊗ 𝟙/d_{S^∁} has squared norm tr(ρ_S²)/d_{S^∁}, which equals
/// Σ_{T⊆S} ‖P_T‖².
pub fn sector_weights(rho: &CMatrix, dims: &[usize]) -> Result<SectorDecomposition> {
    let total = check_dims(dims, rho.nrows(), 1 << 12)?;
    let n = dims.len();
    let mut g = vec![0.0; 1 << n];
    for (mask, slot) in g.iter_mut().enumerate() {
        let keep: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let dk: usize = keep.iter().map(|&p| dims[p]).product();
        let purity = if keep.is_empty() {
            rho.trace().norm_sqr()
        } else {
            let r = partial_trace(rho, dims, &keep)?;
            (r.adjoint() * &r).trace().re
        };
        *slot = purity / (total / dk) as f64;
    }
    let mut supports = BTreeMap::new();
    let mut weights = BTreeMap::new();
    for s in 0..1usize << n {
        // Σ_{T ⊆ S} (−1)^{|S|−|T|} g(T)
        let mut acc = 0.0;
        let mut t = s;
        loop {
            let sign = if (s.count_ones() - t.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * g[t];
            if t == 0 {
                break;
            }
            t = (t - 1) & s;
        }
        let acc = if acc.abs() < 1e-15 { 0.0 } else { acc };
        let parties: Vec<usize> = (0..n).filter(|i| s >> i & 1 == 1).collect();
        *weights.entry(parties.len()).or_insert(0.0) += acc;
        supports.insert(parties, acc);
    }
    Ok(SectorDecomposition { weights, supports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    fn pure(psi: &[C64]) -> CMatrix {
        CMatrix::from_fn(psi.len(), psi.len(), |a, b| psi[a] * psi[b].conj())
    }

    #[test]
    fn maximally_mixed_has_only_identity() {
        let rho = CMatrix::identity(4, 4) / C64::new(4.0, 0.0);
        let s = sector_weights(&rho, &[2, 2]).unwrap();
        assert!((s.weights[&0] - 0.25).abs() < 1e-15);
        assert_eq!(s.weights[&1], 0.0);
        assert_eq!(s.weights[&2], 0.0);
    }

    #[test]
    fn singlet_lives_on_two_body_terms() {
        let h = 0.5f64.sqrt();
        let rho = pure(&[C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0), C64::new(0.0, 0.0)]);
        let s = sector_weights(&rho, &[2, 2]).unwrap();
        // ρ = (𝟙 − Σ σ⊗σ)/4: the three two-body terms carry 3·4/16
        assert!((s.weights[&2] - 0.75).abs() < 1e-12);
        assert!(s.weights[&1].abs() < 1e-15);
        assert!((s.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn local_pure_state_has_single_party_weight() {
        // |0⟩⟨0| ⊗ 𝟙/2
        let mut rho = CMatrix::zeros(4, 4);
        rho[(0, 0)] = C64::new(0.5, 0.0);
        rho[(1, 1)] = C64::new(0.5, 0.0);
        let s = sector_weights(&rho, &[2, 2]).unwrap();
        assert!((s.supports[&vec![0]] - 0.25).abs() < 1e-12);
        assert!(s.supports[&vec![1]].abs() < 1e-15);
        assert!(s.weights[&2].abs() < 1e-15);
        assert!((s.total() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mixed_dimensions_reconstruct_purity() {
        let psi: Vec<C64> = (0..12).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let psi: Vec<C64> = psi.iter().map(|z| z / n).collect();
        let s = sector_weights(&pure(&psi), &[2, 3, 2]).unwrap();
        assert!((s.total() - 1.0).abs() < 1e-12);
        assert!(s.supports.values().all(|&w| w >= -1e-12));
    }
}
