//! Spin-½ representation machinery: ε arcs, symmetrizers, total-spin
//! projectors on k-slot legs and angular-momentum generators.
//!
//! ε arcs are oriented from the first to the second index: the arc tensor is
//! `iε` with `(0,1) → i`, `(1,0) → -i`. With this orientation a closed loop
//! `Σ ε_ab ε_ab` evaluates to −2.

use crate::tensorcore::DenseTensor;
use crate::{CMatrix, C64};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A spin label stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpinLabel {
    pub twice_j: u32,
}

impl SpinLabel {
    pub fn from_twice(twice_j: u32) -> Self {
        SpinLabel { twice_j }
    }

    /// Nearest label to `j` (rounded to a half-integer).
    pub fn from_j(j: f64) -> Self {
        SpinLabel {
            twice_j: (2.0 * j).round().max(0.0) as u32,
        }
    }

    pub fn j(self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.twice_j as usize + 1
    }

    /// j(j+1)
    pub fn casimir(self) -> f64 {
        let j = self.j();
        j * (j + 1.0)
    }
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice_j.is_multiple_of(2) {
            write!(f, "{}", self.twice_j / 2)
        } else {
            write!(f, "{}/2", self.twice_j)
        }
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The iε matrix `[[0, i], [-i, 0]]`.
pub fn epsilon_matrix() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), c(0.0)])
}

/// The iε arc as a two-leg tensor (legs 0 and 1, one slot each).
pub fn epsilon_pair() -> DenseTensor {
    let e = epsilon_matrix();
    DenseTensor::from_vertex_data(2, 1, vec![e[(0, 0)], e[(0, 1)], e[(1, 0)], e[(1, 1)]]).expect("2 slots")
}

/// The arc as a 4-vector over two slots: (0, i, -i, 0).
pub fn epsilon_vector() -> Vec<C64> {
    vec![c(0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), c(0.0)]
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Projector onto the symmetric subspace of (ℂ²)^{⊗n}: entries
/// `1/C(n,w)` between basis strings of equal Hamming weight `w`.
pub fn symmetrizer_matrix(n: usize) -> CMatrix {
    let d = 1usize << n;
    let w: Vec<usize> = (0..d).map(|x| x.count_ones() as usize).collect();
    CMatrix::from_fn(d, d, |r, col| {
        if w[r] == w[col] {
            c(1.0 / binomial(n, w[r]))
        } else {
            c(0.0)
        }
    })
}

/// Symmetrizer as an operator tensor (out-leg 0, in-leg 1).
pub fn symmetrizer(n: usize) -> DenseTensor {
    DenseTensor::from_operator(0, 1, &symmetrizer_matrix(n)).expect("power of two")
}

/// Pauli matrices divided by two.
pub fn spin_half() -> [CMatrix; 3] {
    spin_matrices(SpinLabel::from_twice(1))
}

/// Spin-j generators (Jx, Jy, Jz) in the |j, m⟩ basis, m descending.
pub fn spin_matrices(label: SpinLabel) -> [CMatrix; 3] {
    let d = label.dim();
    let j = label.j();
    let m: Vec<f64> = (0..d).map(|i| j - i as f64).collect();
    let mut jp = CMatrix::zeros(d, d);
    for i in 1..d {
        jp[(i - 1, i)] = c((j * (j + 1.0) - m[i] * (m[i] + 1.0)).sqrt());
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5);
    let jy = (&jp - &jm) * C64::new(0.0, -0.5);
    let jz = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, m.iter().map(|&x| c(x))));
    [jx, jy, jz]
}

/// `1 ⊗ op ⊗ 1` with `op` acting on `width` consecutive slots starting at
/// `start` out of `n` slots.
pub fn embed(op: &CMatrix, start: usize, n: usize) -> CMatrix {
    let width = op.nrows().trailing_zeros() as usize;
    let left = CMatrix::identity(1 << start, 1 << start);
    let rest = n - start - width;
    let right = CMatrix::identity(1 << rest, 1 << rest);
    left.kronecker(op).kronecker(&right)
}

/// `g ⊗ … ⊗ g` (k factors).
pub fn kron_power(g: &CMatrix, k: usize) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for _ in 0..k {
        out = out.kronecker(g);
    }
    out
}

/// Haar-random SU(2) element.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> CMatrix {
    let mut v = [0.0f64; 4];
    loop {
        for x in v.iter_mut() {
            // Box–Muller
            let u1: f64 = rng.random_range(1e-300..1.0);
            let u2: f64 = rng.random_range(0.0..1.0);
            *x = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            break;
        }
    }
    let a = C64::new(v[0], v[1]);
    let b = C64::new(v[2], v[3]);
    CMatrix::from_row_slice(2, 2, &[a, b, -b.conj(), a.conj()])
}

/// Total-spin generators on k slots.
#[derive(Clone, Debug)]
pub struct GeneratorTriple {
    pub k: usize,
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
}

impl GeneratorTriple {
    pub fn components(&self) -> [&CMatrix; 3] {
        [&self.jx, &self.jy, &self.jz]
    }

    /// J² = Jx² + Jy² + Jz².
    pub fn casimir(&self) -> CMatrix {
        &self.jx * &self.jx + &self.jy * &self.jy + &self.jz * &self.jz
    }
}

/// J^i = Σ_slots σ^i/2 on (ℂ²)^{⊗k}.
pub fn total_spin_generators(k: usize) -> GeneratorTriple {
    let s = spin_half();
    let d = 1usize << k;
    let mut out = [CMatrix::zeros(d, d), CMatrix::zeros(d, d), CMatrix::zeros(d, d)];
    for slot in 0..k {
        for (o, si) in out.iter_mut().zip(s.iter()) {
            *o += embed(si, slot, k);
        }
    }
    let [jx, jy, jz] = out;
    GeneratorTriple { k, jx, jy, jz }
}

/// Orthogonal projection of an operator on k slots onto the commutant of
/// g^{⊗k}, i.e. its average over SU(2). The result is gauge invariant.
pub fn twirl(h: &CMatrix, k: usize) -> CMatrix {
    let d = 1usize << k;
    assert!(h.nrows() == d && h.ncols() == d, "operator must be {d}x{d}");
    let gens = total_spin_generators(k);
    let id = CMatrix::identity(d, d);
    // vec(JX − XJ) = (I⊗J − Jᵀ⊗I) vec(X) in column-major order
    let mut gram = CMatrix::zeros(d * d, d * d);
    for j in gens.components() {
        let l = id.kronecker(j) - j.transpose().kronecker(&id);
        gram += l.adjoint() * l;
    }
    let (vals, vecs) = crate::tensorcore::linalg::hermitian_eigen(&gram);
    let x = nalgebra::DVector::from_column_slice(h.as_slice());
    let mut out = nalgebra::DVector::<C64>::zeros(d * d);
    for (i, v) in vals.iter().enumerate() {
        if v.abs() < 1e-9 {
            let u = vecs.column(i);
            out += u * u.dotc(&x);
        }
    }
    CMatrix::from_column_slice(d, d, out.as_slice())
}

/// Multiplicities of spin j in (ℂ²)^{⊗k}, by the Catalan-triangle recursion
/// m_k(j) = m_{k-1}(j-½) + m_{k-1}(j+½).
pub fn irrep_multiplicities(k: usize) -> BTreeMap<SpinLabel, usize> {
    let mut m: BTreeMap<u32, usize> = BTreeMap::new();
    m.insert(0, 1);
    for _ in 0..k {
        let mut next = BTreeMap::new();
        for (&tj, &mult) in &m {
            *next.entry(tj + 1).or_insert(0) += mult;
            if tj > 0 {
                *next.entry(tj - 1).or_insert(0) += mult;
            }
        }
        m = next;
    }
    m.into_iter().map(|(tj, n)| (SpinLabel::from_twice(tj), n)).collect()
}

/// One coupling path of the recursive construction.
///
/// `map` sends the k slots to `2j` symmetrized lines followed by pairs of
/// lines closed by arcs (cup–cap insertions). The diagram's squared
/// Hilbert–Schmidt norm fixes its prefactor.
#[derive(Clone, Debug)]
pub struct Branch {
    /// 2j after each added slot.
    pub path: Vec<u32>,
    pub map: CMatrix,
    pub hs_norm_sqr: f64,
}

impl Branch {
    pub fn j(&self) -> SpinLabel {
        SpinLabel::from_twice(*self.path.last().unwrap())
    }

    /// Diagram prefactor 1/‖W‖².
    pub fn prefactor(&self) -> f64 {
        1.0 / self.hs_norm_sqr
    }

    /// Idempotent branch projector (2j+1)/‖W‖² · W†W.
    pub fn projector(&self) -> CMatrix {
        let w = &self.map;
        w.adjoint() * w * c(self.j().dim() as f64 / self.hs_norm_sqr)
    }
}

#[derive(Clone, Debug)]
pub struct SpinProjectorEntry {
    pub j: SpinLabel,
    pub multiplicity: usize,
    pub projector: CMatrix,
    pub branches: Vec<Branch>,
}

#[derive(Clone, Debug)]
pub struct SpinProjectorSet {
    pub k: usize,
    pub entries: Vec<SpinProjectorEntry>,
}

impl SpinProjectorSet {
    pub fn get(&self, j: SpinLabel) -> Option<&SpinProjectorEntry> {
        self.entries.iter().find(|e| e.j == j)
    }

    /// Projector for `j`, or zero if `j` does not occur.
    pub fn projector(&self, j: SpinLabel) -> CMatrix {
        self.get(j)
            .map(|e| e.projector.clone())
            .unwrap_or_else(|| CMatrix::zeros(1 << self.k, 1 << self.k))
    }
}

/// Permutation operator on `n` lines: line `order[i]` of the input lands at
/// position `i` of the output.
fn line_permutation(order: &[usize]) -> CMatrix {
    let n = order.len();
    let d = 1usize << n;
    let mut p = CMatrix::zeros(d, d);
    for x in 0..d {
        let mut y = 0usize;
        for &src in order {
            y = (y << 1) | ((x >> (n - 1 - src)) & 1);
        }
        p[(y, x)] = c(1.0);
    }
    p
}

fn arc_projector() -> CMatrix {
    let e = epsilon_vector();
    CMatrix::from_fn(4, 4, |r, col| e[r] * e[col].conj())
}

struct Partial {
    path: Vec<u32>,
    map: CMatrix,
    lines: usize,
}

/// Total-spin projectors on k slots, built by coupling one slot at a time.
///
/// At each step a branch with spin j either symmetrizes the new slot with its
/// 2j open lines (j+½) or closes the new slot against its last open line with
/// an arc |e⟩⟨e| (j−½). Branch projectors are normalized by the diagram's
/// squared Hilbert–Schmidt norm.
pub fn spin_projectors(k: usize) -> SpinProjectorSet {
    assert!(k >= 1, "k must be positive");
    let mut parts = vec![Partial {
        path: vec![1],
        map: CMatrix::identity(2, 2),
        lines: 1,
    }];
    let id2 = CMatrix::identity(2, 2);
    for _ in 1..k {
        let mut next = Vec::new();
        for p in &parts {
            let tj = *p.path.last().unwrap() as usize;
            let base = p.map.kronecker(&id2);
            let l = p.lines + 1;
            let cups = p.lines - tj;
            // bring the new line right after the open lines
            let mut order: Vec<usize> = (0..tj).collect();
            order.push(p.lines);
            order.extend(tj..p.lines);
            let moved = line_permutation(&order) * base;
            // j + 1/2
            {
                let op = symmetrizer_matrix(tj + 1).kronecker(&CMatrix::identity(1 << cups, 1 << cups));
                let mut path = p.path.clone();
                path.push(tj as u32 + 1);
                next.push(Partial {
                    path,
                    map: op * &moved,
                    lines: l,
                });
            }
            // j - 1/2
            if tj >= 1 {
                let op = CMatrix::identity(1 << (tj - 1), 1 << (tj - 1))
                    .kronecker(&arc_projector())
                    .kronecker(&CMatrix::identity(1 << cups, 1 << cups));
                let closed = op * &moved;
                // the two arc lines join the cup lines at the end
                let mut order: Vec<usize> = (0..tj - 1).collect();
                order.extend(tj + 1..l);
                order.extend([tj - 1, tj]);
                let mut path = p.path.clone();
                path.push(tj as u32 - 1);
                next.push(Partial {
                    path,
                    map: line_permutation(&order) * closed,
                    lines: l,
                });
            }
        }
        parts = next;
    }
    let mut by_j: BTreeMap<u32, Vec<Branch>> = BTreeMap::new();
    for p in parts {
        let hs = p.map.iter().map(|z| z.norm_sqr()).sum();
        by_j.entry(*p.path.last().unwrap()).or_default().push(Branch {
            path: p.path,
            map: p.map,
            hs_norm_sqr: hs,
        });
    }
    let d = 1usize << k;
    let entries = by_j
        .into_iter()
        .map(|(tj, branches)| {
            let mut projector = CMatrix::zeros(d, d);
            for b in &branches {
                projector += b.projector();
            }
            SpinProjectorEntry {
                j: SpinLabel::from_twice(tj),
                multiplicity: branches.len(),
                projector,
                branches,
            }
        })
        .collect();
    SpinProjectorSet { k, entries }
}
