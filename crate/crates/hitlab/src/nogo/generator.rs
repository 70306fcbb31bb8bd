use crate::su2kit::{spin_matrices, SpinLabel};
use crate::tensorcore::linalg::apply_local;
use crate::{CMatrix, HitError, Result, C64};
use serde::{Deserialize, Serialize};

/// Traceless Hermitian operator basis used for the β coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalBasis {
    /// Generalized Gell-Mann matrices, normalized to tr(T_a T_b) = 2δ_ab.
    GellMann,
    /// The three spin-(d−1)/2 angular-momentum matrices.
    Spin,
}

impl LocalBasis {
    pub fn matrices(self, d: usize) -> Vec<CMatrix> {
        match self {
            LocalBasis::GellMann => gell_mann(d),
            LocalBasis::Spin => spin_matrices(SpinLabel::from_twice(d as u32 - 1)).to_vec(),
        }
    }
}

fn gell_mann(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::new();
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    for a in 0..d {
        for b in a + 1..d {
            let mut s = CMatrix::zeros(d, d);
            s[(a, b)] = one;
            s[(b, a)] = one;
            out.push(s);
            let mut t = CMatrix::zeros(d, d);
            t[(a, b)] = -i;
            t[(b, a)] = i;
            out.push(t);
        }
    }
    for l in 1..d {
        let f = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(d, d);
        for x in 0..l {
            m[(x, x)] = C64::new(f, 0.0);
        }
        m[(l, l)] = C64::new(-f * l as f64, 0.0);
        out.push(m);
    }
    out
}

/// One party of a generator: N_i = α_i 𝟙 + Σ_a β_{i,a} T_a.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Party {
    pub dim: usize,
    pub alpha: f64,
    pub betas: Vec<(usize, f64)>,
}

/// U(1) generator N̂ = Σ_i N_i acting on a multipartite system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub parties: Vec<Party>,
    pub basis: LocalBasis,
}

impl GeneratorSpec {
    /// Total angular momentum along `axis` (0, 1, 2 for x, y, z) with each
    /// party carrying the spin-(d−1)/2 irrep.
    pub fn total_spin(dims: &[usize], axis: usize) -> GeneratorSpec {
        GeneratorSpec {
            parties: dims
                .iter()
                .map(|&dim| Party {
                    dim,
                    alpha: 0.0,
                    betas: vec![(axis, 1.0)],
                })
                .collect(),
            basis: LocalBasis::Spin,
        }
    }

    /// Spin component `axis` acting on a single party.
    pub fn local_spin(dims: &[usize], party: usize, axis: usize) -> GeneratorSpec {
        let mut g = GeneratorSpec::total_spin(dims, axis);
        for (i, p) in g.parties.iter_mut().enumerate() {
            if i != party {
                p.betas.clear();
            }
        }
        g
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parties.iter().map(|p| p.dim).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.parties.iter().enumerate() {
            if p.dim < 2 {
                return Err(HitError::Spec(format!("party {i} has dimension {}", p.dim)));
            }
            let n = self.basis.matrices(p.dim).len();
            if let Some((a, _)) = p.betas.iter().find(|(a, _)| *a >= n) {
                return Err(HitError::Spec(format!("party {i}: basis index {a} out of {n}")));
            }
        }
        Ok(())
    }

    /// Whether party `i` acts nontrivially (some β ≠ 0).
    pub fn is_nontrivial(&self, i: usize) -> bool {
        self.parties[i].betas.iter().any(|(_, b)| *b != 0.0)
    }

    pub fn local_operator(&self, i: usize) -> CMatrix {
        let p = &self.parties[i];
        let basis = self.basis.matrices(p.dim);
        let mut m = CMatrix::identity(p.dim, p.dim) * C64::new(p.alpha, 0.0);
        for &(a, b) in &p.betas {
            m += &basis[a] * C64::new(b, 0.0);
        }
        m
    }

    /// N̂|ψ⟩.
    pub fn apply(&self, state: &[C64]) -> Result<Vec<C64>> {
        self.validate()?;
        let dims = self.dims();
        let mut out = vec![C64::new(0.0, 0.0); state.len()];
        for i in 0..dims.len() {
            let part = apply_local(state, &dims, i, &self.local_operator(i))?;
            for (o, x) in out.iter_mut().zip(part) {
                *o += x;
            }
        }
        Ok(out)
    }
}

/// A symmetry to test a state against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    U1(GeneratorSpec),
    /// Global SU(2) on parties of the given dimensions: all three total-spin
    /// generators must annihilate the state.
    Su2 { dims: Vec<usize> },
}

impl Symmetry {
    pub fn su2_qubits(n: usize) -> Symmetry {
        Symmetry::Su2 { dims: vec![2; n] }
    }

    /// Generators together with the required eigenvalue (None = any).
    pub fn generators(&self) -> Vec<(GeneratorSpec, Option<f64>)> {
        match self {
            Symmetry::U1(g) => vec![(g.clone(), None)],
            Symmetry::Su2 { dims } => (0..3).map(|a| (GeneratorSpec::total_spin(dims, a), Some(0.0))).collect(),
        }
    }
}

/// Result of testing N̂|ψ⟩ = c|ψ⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Eigencheck {
    pub invariant: bool,
    pub c: C64,
    /// ‖N̂ψ − cψ‖ / ‖ψ‖
    pub residual: f64,
}

pub(crate) fn eigencheck(state: &[C64], gen: &GeneratorSpec, tol: f64) -> Result<Eigencheck> {
    let n_psi = gen.apply(state)?;
    let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    if norm == 0.0 {
        return Err(HitError::Spec("zero state".into()));
    }
    let c: C64 = state.iter().zip(&n_psi).map(|(a, b)| a.conj() * b).sum::<C64>() / norm;
    let res: f64 = n_psi
        .iter()
        .zip(state)
        .map(|(x, s)| (x - c * s).norm_sqr())
        .sum::<f64>()
        .sqrt()
        / norm.sqrt();
    Ok(Eigencheck {
        invariant: res <= tol,
        c,
        residual: res,
    })
}

/// Whether N̂|ψ⟩ = c|ψ⟩ within 1e-9, and the eigenvalue c.
pub fn check_u1_invariance(state: &[C64], gen: &GeneratorSpec) -> Result<(bool, C64)> {
    let e = eigencheck(state, gen, crate::TOL)?;
    Ok((e.invariant, e.c))
}
