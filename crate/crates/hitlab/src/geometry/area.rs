use crate::hit::HitSpec;
use crate::su2kit::{spin_matrices, symmetrizer_matrix, total_spin_generators, SpinLabel};
use crate::tensorcore::linalg::{apply_local, hermitian_eigen};
use crate::tensorcore::pairing::epsilon_mat;
use crate::{CMatrix, HitError, Result, C64};
use serde::Serialize;

/// One spin-network basis state of a vertex.
#[derive(Clone, Debug, Serialize)]
pub struct BasisElement {
    /// Spin of each leg.
    pub labels: Vec<SpinLabel>,
    /// Hilbert–Schmidt norm of the unnormalized diagram.
    pub norm: f64,
    /// Unnormalized diagram amplitudes (slot 0 most significant).
    #[serde(skip)]
    pub tensor: Vec<C64>,
}

impl BasisElement {
    fn normalized(&self) -> impl Iterator<Item = C64> + '_ {
        self.tensor.iter().map(move |z| z / self.norm)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpinBasisDecomposition {
    pub q: usize,
    pub k: usize,
    pub basis: Vec<BasisElement>,
    /// c_i = ⟨A_i|A⟩ / (n_i ‖A‖); empty for a bare basis.
    pub coeffs: Vec<C64>,
    /// ‖A‖ of the unnormalized vertex tensor.
    pub a_norm: f64,
}

impl SpinBasisDecomposition {
    /// Σ |c|² over basis states with the given leg labels.
    pub fn weight(&self, labels: &[SpinLabel]) -> f64 {
        self.basis
            .iter()
            .zip(&self.coeffs)
            .filter(|(b, _)| b.labels == labels)
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// The coefficient of a label set with a single basis state.
    pub fn coeff(&self, labels: &[SpinLabel]) -> Option<C64> {
        let mut it = self.basis.iter().zip(&self.coeffs).filter(|(b, _)| b.labels == labels);
        let first = it.next()?;
        it.next().is_none().then_some(*first.1)
    }

    /// Σ_i c_i A_i / n_i · ‖A‖, which reproduces A for a complete basis.
    pub fn reconstruct(&self) -> Vec<C64> {
        let n = self.basis.first().map_or(0, |b| b.tensor.len());
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (b, c) in self.basis.iter().zip(&self.coeffs) {
            for (o, x) in out.iter_mut().zip(b.normalized()) {
                *o += c * x * self.a_norm;
            }
        }
        out
    }
}

fn lab(v: &[u32]) -> Vec<SpinLabel> {
    v.iter().map(|&t| SpinLabel::from_twice(t)).collect()
}

/// Diagram from oriented iε arcs and symmetrized legs on 3·2 slots.
fn diagram(arcs: &[(usize, usize)], sym_legs: &[usize]) -> Vec<C64> {
    let e = epsilon_mat();
    let n = 6;
    let mut v: Vec<C64> = (0..1usize << n)
        .map(|x| {
            let bit = |s: usize| (x >> (n - 1 - s)) & 1;
            arcs.iter().fold(C64::new(1.0, 0.0), |acc, &(a, b)| acc * e[bit(a)][bit(b)])
        })
        .collect();
    let s = symmetrizer_matrix(2);
    for &leg in sym_legs {
        v = apply_local(&v, &[4, 4, 4], leg, &s).expect("dimensions fixed");
    }
    v
}

/// The five three-valent diagrams for k = 2: a spin-0 leg closes its two
/// slots with an arc; spin-1 legs are symmetrized and joined by arcs. Arc
/// orientations fix the sign of each diagram.
fn basis_q3_k2() -> Vec<BasisElement> {
    let raw: [(&[u32], Vec<(usize, usize)>, Vec<usize>); 5] = [
        (&[0, 0, 0], vec![(1, 0), (2, 3), (4, 5)], vec![]),
        (&[0, 2, 2], vec![(1, 0), (3, 4), (2, 5)], vec![1, 2]),
        (&[2, 0, 2], vec![(3, 2), (5, 0), (4, 1)], vec![0, 2]),
        (&[2, 2, 0], vec![(5, 4), (1, 2), (0, 3)], vec![0, 1]),
        (&[2, 2, 2], vec![(2, 1), (3, 4), (5, 0)], vec![0, 1, 2]),
    ];
    raw.into_iter()
        .map(|(l, arcs, sym)| {
            let tensor = diagram(&arcs, &sym);
            let norm = tensor.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            BasisElement {
                labels: lab(l),
                norm,
                tensor,
            }
        })
        .collect()
}

/// Largest q·k handled by the generic dense basis.
pub const BASIS_SLOT_LIMIT: usize = 10;

/// Invariant subspace split by leg spins, via Casimir eigendecomposition.
fn basis_generic(q: usize, k: usize) -> Result<Vec<BasisElement>> {
    let n = q * k;
    if n > BASIS_SLOT_LIMIT {
        return Err(HitError::SizeLimit {
            what: "spin basis slots",
            needed: n,
            limit: BASIS_SLOT_LIMIT,
        });
    }
    let (vals, vecs) = hermitian_eigen(&total_spin_generators(n).casimir());
    let inv: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].abs() < 1e-8).collect();
    let v = CMatrix::from_fn(1 << n, inv.len(), |r, c| vecs[(r, inv[c])]);
    let leg_cas = total_spin_generators(k).casimir();
    let dims = vec![1usize << k; q];
    // restricted leg Casimirs commute; diagonalize a generic combination
    let mut restricted = Vec::new();
    for leg in 0..q {
        let mut cols = CMatrix::zeros(1 << n, inv.len());
        for c in 0..inv.len() {
            let col: Vec<C64> = v.column(c).iter().copied().collect();
            let out = apply_local(&col, &dims, leg, &leg_cas)?;
            cols.set_column(c, &nalgebra::DVector::from_vec(out));
        }
        restricted.push(v.adjoint() * cols);
    }
    let mut combo = CMatrix::zeros(inv.len(), inv.len());
    for (i, m) in restricted.iter().enumerate() {
        combo += m * C64::new(1.0 + 0.61803 * i as f64 + 0.1 * (i * i) as f64, 0.0);
    }
    let (_, w) = hermitian_eigen(&combo);
    let mut out = Vec::new();
    for c in 0..w.ncols() {
        let coords = w.column(c);
        let labels = restricted
            .iter()
            .map(|m| {
                let cas = (coords.adjoint() * m * coords)[(0, 0)].re;
                // j(j+1) = cas
                SpinLabel::from_j(((1.0 + 4.0 * cas).sqrt() - 1.0) / 2.0)
            })
            .collect();
        let t = &v * coords;
        out.push(BasisElement {
            labels,
            norm: 1.0,
            tensor: t.iter().copied().collect(),
        });
    }
    out.sort_by(|a, b| a.labels.cmp(&b.labels));
    Ok(out)
}

/// Orthogonal basis of the SU(2)-invariant space of a q-leg vertex with k
/// slots per leg, labelled by leg spins. For q = 3, k = 2 the diagrams are
/// built from symmetrizers and arcs; otherwise the basis comes from Casimir
/// eigenvectors and is already normalized.
pub fn spin_basis(q: usize, k: usize) -> Result<SpinBasisDecomposition> {
    let basis = if q == 3 && k == 2 { basis_q3_k2() } else { basis_generic(q, k)? };
    Ok(SpinBasisDecomposition {
        q,
        k,
        basis,
        coeffs: Vec::new(),
        a_norm: 0.0,
    })
}

/// Like [`spin_basis`] but always through the Casimir construction.
pub fn spin_basis_generic(q: usize, k: usize) -> Result<SpinBasisDecomposition> {
    Ok(SpinBasisDecomposition {
        q,
        k,
        basis: basis_generic(q, k)?,
        coeffs: Vec::new(),
        a_norm: 0.0,
    })
}

fn decompose_in(spec: &HitSpec, mut d: SpinBasisDecomposition) -> Result<SpinBasisDecomposition> {
    let a = spec.vertex_tensor()?;
    let a_norm = a.norm_sqr().sqrt();
    if a_norm == 0.0 {
        return Err(HitError::Spec("vertex tensor vanishes".into()));
    }
    d.coeffs = d
        .basis
        .iter()
        .map(|b| b.normalized().zip(a.data()).map(|(x, y)| x.conj() * y).sum::<C64>() / a_norm)
        .collect();
    d.a_norm = a_norm;
    Ok(d)
}

/// Expansion of the vertex tensor in the spin basis.
pub fn decompose_vertex(spec: &HitSpec) -> Result<SpinBasisDecomposition> {
    spec.validate()?;
    decompose_in(spec, spin_basis(spec.q, spec.k)?)
}

/// Expansion in the Casimir basis, independent of the drawn diagrams.
pub fn decompose_vertex_generic(spec: &HitSpec) -> Result<SpinBasisDecomposition> {
    spec.validate()?;
    decompose_in(spec, spin_basis_generic(spec.q, spec.k)?)
}

/// Area eigenvalue of a three-valent intertwiner, Δ_j = −j(j+1).
pub fn area_eigenvalue(j: SpinLabel, k: SpinLabel, l: SpinLabel) -> Result<f64> {
    let (a, b, c) = (-j.casimir(), -k.casimir(), -l.casimir());
    let s2 = 2.25 * (2.0 * (a * b + a * c + b * c) - (a * a + b * b + c * c)) - 0.5 * (a + b + c);
    if s2 < -1e-12 {
        return Err(HitError::InvalidTriple(s2));
    }
    Ok(s2.max(0.0).sqrt())
}

/// Area of the unique intertwiner on legs of spins `labels`, from the
/// operator W = Σ_{e<e'} sgn(e,e') X(e)×X(e') with S² = W†·W. The legs sit
/// in counterclockwise order, so the planar signs make W = X₀×X₁ + X₁×X₂ + X₂×X₀.
pub fn grasp_area_oracle(labels: [SpinLabel; 3]) -> Result<f64> {
    let dims: Vec<usize> = labels.iter().map(|l| l.dim()).collect();
    let total: usize = dims.iter().product();
    let embed = |leg: usize, m: &CMatrix| -> CMatrix {
        let mut out = CMatrix::identity(1, 1);
        for (i, &d) in dims.iter().enumerate() {
            out = out.kronecker(&if i == leg { m.clone() } else { CMatrix::identity(d, d) });
        }
        out
    };
    let x: Vec<Vec<CMatrix>> = labels
        .iter()
        .enumerate()
        .map(|(leg, &l)| spin_matrices(l).iter().map(|m| embed(leg, m)).collect())
        .collect();
    let mut cas = CMatrix::zeros(total, total);
    for a in 0..3 {
        let s = &x[0][a] + &x[1][a] + &x[2][a];
        cas += &s * &s;
    }
    let (vals, vecs) = hermitian_eigen(&cas);
    let inv: Vec<usize> = (0..total).filter(|&i| vals[i].abs() < 1e-9).collect();
    if inv.len() != 1 {
        return Err(HitError::Spec(format!(
            "labels ({}, {}, {}) admit {} intertwiners",
            labels[0],
            labels[1],
            labels[2],
            inv.len()
        )));
    }
    let psi = vecs.column(inv[0]).into_owned();
    let mut s2 = 0.0;
    let mut img = Vec::new();
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        let mut w = CMatrix::zeros(total, total);
        for (e1, e2) in [(0, 1), (1, 2), (2, 0)] {
            w += &x[e1][b] * &x[e2][c] - &x[e1][c] * &x[e2][b];
        }
        let wpsi = &w * &psi;
        s2 += wpsi.norm_squared();
        img.push((w, wpsi));
    }
    // the intertwiner must be an eigenvector of S²
    let mut s2psi = nalgebra::DVector::<C64>::zeros(total);
    for (w, wpsi) in &img {
        s2psi += w.adjoint() * wpsi;
    }
    let res = (s2psi - &psi * C64::new(s2, 0.0)).norm();
    if res > 1e-8 {
        return Err(HitError::Spec(format!("intertwiner is not an area eigenstate (residual {res:e})")));
    }
    Ok(s2.sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct AreaTerm {
    pub labels: Vec<SpinLabel>,
    pub weight: f64,
    pub eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexAreaReport {
    pub terms: Vec<AreaTerm>,
    /// ⟨S_v⟩ = Σ |c|² s_labels
    pub expectation: f64,
    /// Set when a literature value exists for this tensor and disagrees
    /// with the computed sum.
    pub flag: Option<String>,
}

impl VertexAreaReport {
    /// Area of a surface containing `n_vertices` copies of the vertex.
    pub fn surface_area(&self, n_vertices: usize) -> f64 {
        n_vertices as f64 * self.expectation
    }
}

/// Value printed in the literature for the three-valent k = 2 left/right
/// tensor; it counts the three spin-(0,1,1) labels once.
pub fn reference_vertex_area_73() -> f64 {
    3.0 / 16.0 * 2f64.sqrt() + 3.0 / 8.0 * 30f64.sqrt()
}

/// Computed ⟨S_v⟩ for the three-valent k = 2 left/right tensor.
pub fn computed_vertex_area_73() -> f64 {
    9.0 / 16.0 * 2f64.sqrt() + 3.0 / 8.0 * 30f64.sqrt()
}

/// Expected vertex area of a three-valent HIT.
pub fn vertex_area(spec: &HitSpec) -> Result<VertexAreaReport> {
    if spec.q != 3 {
        return Err(HitError::Unsupported(format!("area eigenvalues are known for three-valent vertices, got q={}", spec.q)));
    }
    let d = decompose_vertex(spec)?;
    let mut terms: Vec<AreaTerm> = Vec::new();
    for b in &d.basis {
        if terms.iter().any(|t| t.labels == b.labels) {
            continue;
        }
        let [j, k, l] = [b.labels[0], b.labels[1], b.labels[2]];
        terms.push(AreaTerm {
            labels: b.labels.clone(),
            weight: d.weight(&b.labels),
            eigenvalue: area_eigenvalue(j, k, l)?,
        });
    }
    let expectation: f64 = terms.iter().map(|t| t.weight * t.eigenvalue).sum();
    let is_73 = spec.k == 2 && (expectation - computed_vertex_area_73()).abs() < 1e-9;
    let flag = is_73.then(|| {
        format!(
            "computed {:.12} differs from the literature value {:.12} ((3/16)√2 + (3/8)√30), which counts the three (0,1,1)-type labels once",
            expectation,
            reference_vertex_area_73()
        )
    });
    Ok(VertexAreaReport { terms, expectation, flag })
}
