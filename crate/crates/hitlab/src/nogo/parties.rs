use super::GeneratorSpec;
use crate::tensorcore::linalg::hermitian_eigen;
use crate::{CMatrix, HitError, Result, C64};
use rand::Rng;
use rand_distr::StandardNormal;

/// Largest total dimension handled by the optimizers and enumerations.
pub const TOTAL_DIM_LIMIT: usize = 1 << 12;

pub(crate) fn check_dims(dims: &[usize], len: usize, limit: usize) -> Result<usize> {
    if dims.iter().any(|&d| d < 2) {
        return Err(HitError::Dimension("party dimensions must be at least 2".into()));
    }
    let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).unwrap_or(usize::MAX);
    if total > limit {
        return Err(HitError::SizeLimit {
            what: "total dimension",
            needed: total,
            limit,
        });
    }
    if len != total {
        return Err(HitError::Dimension(format!("state has {len} amplitudes, dims multiply to {total}")));
    }
    Ok(total)
}

/// Mixed-radix digits of `idx`, party 0 most significant.
pub(crate) fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = idx % dims[i];
        idx /= dims[i];
    }
    out
}

fn index_of(parties: &[usize], digits: &[usize], dims: &[usize]) -> usize {
    parties.iter().fold(0, |acc, &p| acc * dims[p] + digits[p])
}

/// Reduced density of a pure state on `keep` (in the given order),
/// normalized to unit trace.
pub fn reduced_density_parties(state: &[C64], dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_dims(dims, state.len(), usize::MAX)?;
    let rest: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let dk: usize = keep.iter().map(|&p| dims[p]).product();
    let dr: usize = rest.iter().map(|&p| dims[p]).product();
    let mut m = CMatrix::zeros(dk, dr);
    for (idx, z) in state.iter().enumerate() {
        let dg = digits(idx, dims);
        m[(index_of(keep, &dg, dims), index_of(&rest, &dg, dims))] = *z;
    }
    let rho = &m * m.adjoint();
    let tr = rho.trace().re;
    if tr <= 0.0 {
        return Err(HitError::Spec("zero state".into()));
    }
    Ok(rho / C64::new(tr, 0.0))
}

/// Partial trace of a density matrix onto `keep`.
pub fn partial_trace(rho: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_dims(dims, rho.nrows(), usize::MAX)?;
    if rho.ncols() != rho.nrows() {
        return Err(HitError::Dimension("density matrix must be square".into()));
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let dk: usize = keep.iter().map(|&p| dims[p]).product();
    let dr: usize = rest.iter().map(|&p| dims[p]).product();
    // full index of (keep index, rest index)
    let mut full = vec![0usize; dk * dr];
    for idx in 0..rho.nrows() {
        let dg = digits(idx, dims);
        full[index_of(keep, &dg, dims) * dr + index_of(&rest, &dg, dims)] = idx;
    }
    Ok(CMatrix::from_fn(dk, dk, |a, b| (0..dr).map(|r| rho[(full[a * dr + r], full[b * dr + r])]).sum()))
}

/// Orthonormal basis (columns) of the SU(2)-invariant subspace, each party
/// carrying the spin-(d−1)/2 irrep. Built as the kernel of J₊ on the total
/// weight-zero space.
pub fn su2_invariant_basis(dims: &[usize]) -> Result<CMatrix> {
    let total = check_dims(dims, dims.iter().product(), TOTAL_DIM_LIMIT)?;
    let twice_m = |dg: &[usize]| -> i64 { dims.iter().zip(dg).map(|(&d, &i)| d as i64 - 1 - 2 * i as i64).sum() };
    let mut zero = Vec::new();
    let mut one = Vec::new();
    for idx in 0..total {
        match twice_m(&digits(idx, dims)) {
            0 => zero.push(idx),
            2 => one.push(idx),
            _ => {}
        }
    }
    if zero.is_empty() {
        return Ok(CMatrix::zeros(total, 0));
    }
    let row_of: std::collections::HashMap<usize, usize> = one.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    let mut jp = CMatrix::zeros(one.len().max(1), zero.len());
    let strides: Vec<usize> = (0..dims.len()).map(|p| dims[p + 1..].iter().product()).collect();
    for (c, &idx) in zero.iter().enumerate() {
        let dg = digits(idx, dims);
        for p in 0..dims.len() {
            if dg[p] == 0 {
                continue;
            }
            // J₊ moves digit i to i−1 (m descending within a party)
            let d = dims[p];
            let j = (d as f64 - 1.0) / 2.0;
            let m = j - dg[p] as f64;
            let amp = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
            let target = idx - strides[p];
            jp[(row_of[&target], c)] += C64::new(amp, 0.0);
        }
    }
    let (vals, vecs) = hermitian_eigen(&(jp.adjoint() * &jp));
    let ker: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].abs() < 1e-9).collect();
    let mut basis = CMatrix::zeros(total, ker.len());
    for (c, &k) in ker.iter().enumerate() {
        for (r, &idx) in zero.iter().enumerate() {
            basis[(idx, c)] = vecs[(r, k)];
        }
    }
    Ok(basis)
}

/// Eigenspaces of a U(1) generator as (eigenvalue, orthonormal basis).
pub fn u1_eigenspaces(gen: &GeneratorSpec) -> Result<Vec<(f64, CMatrix)>> {
    gen.validate()?;
    let dims = gen.dims();
    let total = check_dims(&dims, dims.iter().product(), 1 << 10)?;
    let mut n = CMatrix::zeros(total, total);
    for c in 0..total {
        let mut e = vec![C64::new(0.0, 0.0); total];
        e[c] = C64::new(1.0, 0.0);
        let col = gen.apply(&e)?;
        n.set_column(c, &nalgebra::DVector::from_vec(col));
    }
    let (vals, vecs) = hermitian_eigen(&n);
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        match out.iter_mut().find(|(w, _)| (w - v).abs() < 1e-8) {
            Some((_, idx)) => idx.push(i),
            None => out.push((v, vec![i])),
        }
    }
    Ok(out
        .into_iter()
        .map(|(v, idx)| (v, CMatrix::from_fn(total, idx.len(), |r, c| vecs[(r, idx[c])])))
        .collect())
}

/// Gaussian random normalized vector in the span of `basis`.
pub fn random_in_subspace<R: Rng + ?Sized>(basis: &CMatrix, rng: &mut R) -> Vec<C64> {
    let x = nalgebra::DVector::<C64>::from_fn(basis.ncols(), |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let v = basis * x;
    let n = v.norm();
    v.iter().map(|z| z / n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2kit::{irrep_multiplicities, SpinLabel};

    #[test]
    fn invariant_dimension_matches_multiplicity() {
        for n in [2, 4, 6, 8] {
            let b = su2_invariant_basis(&vec![2; n]).unwrap();
            assert_eq!(b.ncols(), irrep_multiplicities(n)[&SpinLabel::from_twice(0)]);
            let g = b.adjoint() * &b;
            assert!((g - CMatrix::identity(b.ncols(), b.ncols())).norm() < 1e-10);
        }
        assert_eq!(su2_invariant_basis(&[2, 2, 2]).unwrap().ncols(), 0);
        // two spin-1 parties share one singlet
        assert_eq!(su2_invariant_basis(&[3, 3]).unwrap().ncols(), 1);
    }

    #[test]
    fn partial_trace_matches_pure_reduction() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        let b = su2_invariant_basis(&[2, 3, 3, 2]).unwrap();
        let psi = random_in_subspace(&b, &mut rng);
        let dims = [2, 3, 3, 2];
        let rho = CMatrix::from_fn(36, 36, |a, c| psi[a] * psi[c].conj());
        let a = partial_trace(&rho, &dims, &[1, 3]).unwrap();
        let b = reduced_density_parties(&psi, &dims, &[1, 3]).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn u1_eigenspaces_cover_the_space() {
        let g = GeneratorSpec::total_spin(&[2, 2, 2], 2);
        let spaces = u1_eigenspaces(&g).unwrap();
        assert_eq!(spaces.iter().map(|(_, b)| b.ncols()).sum::<usize>(), 8);
        assert_eq!(spaces.len(), 4);
    }
}
