use super::parties::{check_dims, reduced_density_parties, TOTAL_DIM_LIMIT};
use crate::{CMatrix, HitError, Result, C64};
use serde::Serialize;

/// Tolerance on ‖ρ_part − 𝟙/dim‖ for a maximally mixed part.
pub const MM_TOL: f64 = 1e-9;

/// Unordered balanced bipartitions of `2n` parties, each given by the half
/// that contains party 0.
pub fn balanced_bipartitions(parties: usize) -> Vec<Vec<usize>> {
    let half = parties / 2;
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << parties) {
        if mask & 1 == 1 && mask.count_ones() as usize == half {
            out.push((0..parties).filter(|&i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BipartitionCount {
    pub parties: usize,
    pub total: usize,
    pub count: usize,
    /// 2^{n−1} for 2n parties.
    pub bound: usize,
    /// Halves (containing party 0) whose reduced state is maximally mixed.
    pub maximally_mixed: Vec<Vec<usize>>,
}

/// Count balanced bipartitions across which the state is maximally
/// entangled, judged on the smaller-dimensional side.
pub fn count_mm_balanced_bipartitions(state: &[C64], dims: &[usize]) -> Result<BipartitionCount> {
    let m = dims.len();
    if m == 0 || m % 2 == 1 {
        return Err(HitError::Spec(format!("need an even number of parties, got {m}")));
    }
    check_dims(dims, state.len(), TOTAL_DIM_LIMIT)?;
    let parts = balanced_bipartitions(m);
    let mut hits = Vec::new();
    for a in &parts {
        let b: Vec<usize> = (0..m).filter(|i| !a.contains(i)).collect();
        let da: usize = a.iter().map(|&p| dims[p]).product();
        let db: usize = b.iter().map(|&p| dims[p]).product();
        let (side, d) = if da <= db { (a, da) } else { (&b, db) };
        let rho = reduced_density_parties(state, dims, side)?;
        if (rho - CMatrix::identity(d, d) / C64::new(d as f64, 0.0)).norm() <= MM_TOL {
            hits.push(a.clone());
        }
    }
    Ok(BipartitionCount {
        parties: m,
        total: parts.len(),
        count: hits.len(),
        bound: 1 << (m / 2 - 1),
        maximally_mixed: hits,
    })
}

/// Singlets on qubit pairs (i, i+n) of 2n parties.
pub fn opposite_bell_pairs(n: usize) -> Vec<C64> {
    let m = 2 * n;
    let mut psi = vec![C64::new(0.0, 0.0); 1 << m];
    let amp = 2f64.powf(-(n as f64) / 2.0);
    for bits in 0u64..(1 << n) {
        let mut idx = 0usize;
        let mut sign = 1.0;
        for i in 0..n {
            let a = (bits >> i & 1) as usize;
            // singlet (|01⟩ − |10⟩)/√2
            idx |= a << (m - 1 - i);
            idx |= (1 - a) << (m - 1 - (i + n));
            if a == 1 {
                sign = -sign;
            }
        }
        psi[idx] = C64::new(sign * amp, 0.0);
    }
    psi
}

pub fn ghz(n: usize) -> Vec<C64> {
    let mut psi = vec![C64::new(0.0, 0.0); 1 << n];
    psi[0] = C64::new(0.5f64.sqrt(), 0.0);
    psi[(1 << n) - 1] = C64::new(0.5f64.sqrt(), 0.0);
    psi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nogo::{random_in_subspace, su2_invariant_basis};
    use rand::SeedableRng;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn enumeration_size() {
        for m in [2, 4, 6, 8] {
            assert_eq!(balanced_bipartitions(m).len(), binom(m, m / 2) / 2);
        }
    }

    #[test]
    fn opposite_bells_saturate() {
        for n in [1, 2, 3] {
            let c = count_mm_balanced_bipartitions(&opposite_bell_pairs(n), &vec![2; 2 * n]).unwrap();
            assert_eq!(c.count, 1 << (n - 1));
            assert_eq!(c.count, c.bound);
        }
    }

    #[test]
    fn ghz_has_none() {
        let c = count_mm_balanced_bipartitions(&ghz(4), &[2; 4]).unwrap();
        assert_eq!(c.count, 0);
    }

    #[test]
    fn invariant_samples_respect_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for m in [4, 6] {
            let b = su2_invariant_basis(&vec![2; m]).unwrap();
            for _ in 0..50 {
                let c = count_mm_balanced_bipartitions(&random_in_subspace(&b, &mut rng), &vec![2; m]).unwrap();
                assert!(c.count <= c.bound);
            }
        }
    }

    #[test]
    fn odd_party_count_rejected() {
        assert!(count_mm_balanced_bipartitions(&ghz(3), &[2; 3]).is_err());
    }
}
