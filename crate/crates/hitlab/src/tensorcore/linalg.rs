use super::dense::DenseTensor;
use crate::{CMatrix, HitError, Result, C64};
use std::collections::HashMap;

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Hermitian eigendecomposition with eigenvalues ascending and eigenvectors as
/// matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let n = h.nrows();
    let eig = h.symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(n, idx.len(), |r, c| eig.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Von Neumann entropy in bits. Eigenvalues below 1e-12 count as zero;
/// eigenvalues below -1e-9 are rejected.
pub fn entropy_bits(rho: &CMatrix) -> Result<f64> {
    let ev = hermitian_eigenvalues(rho);
    entropy_of_spectrum(&ev)
}

pub fn entropy_of_spectrum(ev: &[f64]) -> Result<f64> {
    if let Some(&min) = ev.first() {
        if min < -1e-9 {
            return Err(HitError::NotPsd(min));
        }
    }
    Ok(ev
        .iter()
        .filter(|&&p| p > 1e-12)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        + 0.0)
}

/// Split positions `slots` (global slot indices) out of a basis index.
fn gather_bits(idx: usize, n: usize, slots: &[usize]) -> usize {
    let mut o = 0;
    for &s in slots {
        o = (o << 1) | ((idx >> (n - 1 - s)) & 1);
    }
    o
}

/// Slot positions belonging to `keep` legs, in the tensor's leg order.
fn keep_slots(state: &DenseTensor, keep: &[i64]) -> Result<Vec<usize>> {
    for id in keep {
        state.slot_range(*id)?;
    }
    let mut slots = Vec::new();
    for l in state.legs() {
        if keep.contains(&l.id) {
            slots.extend(state.slot_range(l.id)?);
        }
    }
    Ok(slots)
}

/// Reduced density matrix of the normalized state on the legs in `keep`.
///
/// Rows and columns follow the state's leg order restricted to `keep`.
pub fn reduced_density(state: &DenseTensor, keep: &[i64]) -> Result<CMatrix> {
    let slots = keep_slots(state, keep)?;
    reduced_density_slots(state.data(), state.n_slots(), &slots)
}

/// Reduced density on explicit slot positions of a raw state vector.
pub fn reduced_density_slots(data: &[C64], n: usize, slots: &[usize]) -> Result<CMatrix> {
    if slots.len() > 14 {
        return Err(HitError::SizeLimit {
            what: "reduced density slots",
            needed: slots.len(),
            limit: 14,
        });
    }
    let rest: Vec<usize> = (0..n).filter(|s| !slots.contains(s)).collect();
    let (m, _) = schmidt_matrix(data, n, slots, &rest);
    let d = 1usize << slots.len();
    let mut rho = CMatrix::zeros(d, d);
    let g = &m.matrix * m.matrix.adjoint();
    for (a, &ra) in m.rows.iter().enumerate() {
        for (b, &rb) in m.rows.iter().enumerate() {
            rho[(ra, rb)] = g[(a, b)];
        }
    }
    let tr: f64 = (0..d).map(|i| rho[(i, i)].re).sum();
    if tr <= 0.0 {
        return Err(HitError::Dimension("zero state".into()));
    }
    Ok(rho / C64::new(tr, 0.0))
}

struct Schmidt {
    matrix: CMatrix,
    rows: Vec<usize>,
}

/// Schmidt matrix of a state across (`a`, `b`), restricted to rows and columns
/// with nonzero support. Returns the matrix and the number of support columns.
fn schmidt_matrix(data: &[C64], n: usize, a: &[usize], b: &[usize]) -> (Schmidt, usize) {
    let mut row_of: HashMap<usize, usize> = HashMap::new();
    let mut col_of: HashMap<usize, usize> = HashMap::new();
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for (idx, z) in data.iter().enumerate() {
        if z.norm_sqr() < 1e-28 {
            continue;
        }
        let r = gather_bits(idx, n, a);
        let c = gather_bits(idx, n, b);
        let ri = *row_of.entry(r).or_insert_with(|| {
            rows.push(r);
            rows.len() - 1
        });
        let nc = col_of.len();
        let ci = *col_of.entry(c).or_insert(nc);
        entries.push((ri, ci, *z));
    }
    let mut m = CMatrix::zeros(rows.len(), col_of.len());
    for (r, c, z) in entries {
        m[(r, c)] = z;
    }
    let nc = col_of.len();
    (Schmidt { matrix: m, rows }, nc)
}

/// Entanglement entropy (bits) between slots `a` and the rest of a raw state.
///
/// Works on the support-compressed Schmidt matrix and diagonalizes the
/// smaller Gram matrix, so large states with small support stay cheap.
pub fn bipartite_entropy_slots(data: &[C64], n: usize, a: &[usize]) -> Result<f64> {
    let b: Vec<usize> = (0..n).filter(|s| !a.contains(s)).collect();
    let (s, _) = schmidt_matrix(data, n, a, &b);
    let m = s.matrix;
    let g = if m.nrows() <= m.ncols() {
        &m * m.adjoint()
    } else {
        m.adjoint() * &m
    };
    let tr: f64 = (0..g.nrows()).map(|i| g[(i, i)].re).sum();
    if tr <= 0.0 {
        return Err(HitError::Dimension("zero state".into()));
    }
    let ev = hermitian_eigenvalues(&(g / C64::new(tr, 0.0)));
    entropy_of_spectrum(&ev)
}

/// Entanglement entropy (bits) of legs `keep` of a pure state.
pub fn bipartite_entropy(state: &DenseTensor, keep: &[i64]) -> Result<f64> {
    let slots = keep_slots(state, keep)?;
    bipartite_entropy_slots(state.data(), state.n_slots(), &slots)
}

/// Apply a local operator to party `party` of a state on parties with
/// dimensions `dims` (row-major, party 0 most significant).
pub fn apply_local(state: &[C64], dims: &[usize], party: usize, op: &CMatrix) -> Result<Vec<C64>> {
    let total: usize = dims.iter().product();
    if state.len() != total || party >= dims.len() || op.nrows() != dims[party] || op.ncols() != dims[party] {
        return Err(HitError::Dimension(format!(
            "operator {}x{} on party {party} of {:?}",
            op.nrows(),
            op.ncols(),
            dims
        )));
    }
    let d = dims[party];
    let inner: usize = dims[party + 1..].iter().product();
    let outer = total / (d * inner);
    let mut out = vec![C64::new(0.0, 0.0); total];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * d * inner + i;
            for r in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..d {
                    acc += op[(r, c)] * state[base + c * inner];
                }
                out[base + r * inner] = acc;
            }
        }
    }
    Ok(out)
}
