use super::dense::{DenseTensor, Dir, Leg};
use super::engine::WireTensor;
use crate::{CMatrix, HitError, Result, C64};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// 2×2 pair tensor `m[x_a][x_b]`.
pub type Mat2 = [[C64; 2]; 2];

/// The iε arc: `m[0][1] = i`, `m[1][0] = -i`.
pub fn epsilon_mat() -> Mat2 {
    let z = C64::new(0.0, 0.0);
    [[z, C64::new(0.0, 1.0)], [C64::new(0.0, -1.0), z]]
}

pub fn mat2_identity() -> Mat2 {
    let (z, o) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    [[o, z], [z, o]]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat2_transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

pub fn mat2_from(m: &CMatrix) -> Mat2 {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn mat2_frob_sqr(a: &Mat2) -> f64 {
    a.iter().flatten().map(|z| z.norm_sqr()).sum()
}

/// One matched pair of slots carrying the amplitude `m[x_a][x_b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pair {
    pub a: usize,
    pub b: usize,
    pub m: Mat2,
}

impl Pair {
    pub fn epsilon(a: usize, b: usize) -> Self {
        Pair { a, b, m: epsilon_mat() }
    }

    pub fn is_epsilon(&self) -> bool {
        let e = epsilon_mat();
        self.m.iter().flatten().zip(e.iter().flatten()).all(|(x, y)| (x - y).norm() < 1e-15)
    }

    /// Entanglement (bits) between the two ends.
    pub fn entropy_bits(&self) -> f64 {
        let m = &self.m;
        // eigenvalues of m m† normalized
        let g00 = m[0][0].norm_sqr() + m[0][1].norm_sqr();
        let g11 = m[1][0].norm_sqr() + m[1][1].norm_sqr();
        let g01 = m[0][0] * m[1][0].conj() + m[0][1] * m[1][1].conj();
        let tr = g00 + g11;
        let det = g00 * g11 - g01.norm_sqr();
        let disc = ((tr * tr - 4.0 * det).max(0.0)).sqrt();
        [(tr + disc) / (2.0 * tr), (tr - disc) / (2.0 * tr)]
            .iter()
            .filter(|&&p| p > 1e-12)
            .map(|&p| -p * p.log2())
            .sum()
    }
}

/// Exact state given by a perfect matching of qubit slots.
///
/// The amplitude of a basis string `x` is `scalar · Π_pairs m[x_a][x_b]`.
/// `perms` records the edge slot permutations the state was built with; they
/// are bookkeeping only and do not enter amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingState {
    n_slots: usize,
    pairs: Vec<Pair>,
    pub perms: BTreeMap<String, Vec<usize>>,
    pub scalar: C64,
}

#[derive(Serialize, Deserialize)]
struct PairingJson {
    slots: usize,
    pairs: Vec<[usize; 2]>,
    #[serde(default)]
    perms: BTreeMap<String, Vec<usize>>,
    scalar: [f64; 2],
    /// Pair tensors for pairs that are not plain iε arcs, keyed by pair index.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    tensors: BTreeMap<String, [[[f64; 2]; 2]; 2]>,
}

impl Serialize for PairingState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut tensors = BTreeMap::new();
        for (i, p) in self.pairs.iter().enumerate() {
            if !p.is_epsilon() {
                let m = p.m.map(|r| r.map(|z| [z.re, z.im]));
                tensors.insert(i.to_string(), m);
            }
        }
        PairingJson {
            slots: self.n_slots,
            pairs: self.pairs.iter().map(|p| [p.a, p.b]).collect(),
            perms: self.perms.clone(),
            scalar: [self.scalar.re, self.scalar.im],
            tensors,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PairingState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PairingJson::deserialize(d)?;
        let mut pairs: Vec<Pair> = j.pairs.iter().map(|[a, b]| Pair::epsilon(*a, *b)).collect();
        for (k, m) in &j.tensors {
            let i: usize = k.parse().map_err(serde::de::Error::custom)?;
            let p = pairs.get_mut(i).ok_or_else(|| serde::de::Error::custom("pair index"))?;
            p.m = m.map(|r| r.map(|[re, im]| C64::new(re, im)));
        }
        let mut st = PairingState::new(j.slots, pairs, C64::new(j.scalar[0], j.scalar[1])).map_err(serde::de::Error::custom)?;
        st.perms = j.perms;
        Ok(st)
    }
}

/// Default slot cap for dense conversion.
pub const DENSE_SLOT_LIMIT: usize = 26;

impl PairingState {
    pub fn new(n_slots: usize, pairs: Vec<Pair>, scalar: C64) -> Result<Self> {
        let mut seen = vec![false; n_slots];
        for p in &pairs {
            for s in [p.a, p.b] {
                if s >= n_slots || seen[s] {
                    return Err(HitError::Spec(format!("slot {s} is not matched exactly once")));
                }
                seen[s] = true;
            }
        }
        if seen.iter().any(|x| !x) {
            return Err(HitError::Spec("matching is not perfect".into()));
        }
        Ok(PairingState {
            n_slots,
            pairs,
            perms: BTreeMap::new(),
            scalar,
        })
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    /// Partner slot of `s`.
    pub fn partner(&self, s: usize) -> Option<usize> {
        self.pairs.iter().find_map(|p| {
            if p.a == s {
                Some(p.b)
            } else if p.b == s {
                Some(p.a)
            } else {
                None
            }
        })
    }

    /// ⟨ψ|ψ⟩ in closed form.
    pub fn norm_sqr(&self) -> f64 {
        self.scalar.norm_sqr() * self.pairs.iter().map(|p| mat2_frob_sqr(&p.m)).product::<f64>()
    }

    /// Entropy in bits of the slots in `region`; sums the entanglement of
    /// every pair with exactly one end inside (1 bit per iε pair).
    pub fn entropy(&self, region: &[usize]) -> f64 {
        let mut inside = vec![false; self.n_slots];
        for &s in region {
            if s < self.n_slots {
                inside[s] = true;
            }
        }
        self.pairs
            .iter()
            .filter(|p| inside[p.a] != inside[p.b])
            .map(|p| p.entropy_bits())
            .sum()
    }

    /// Number of pairs with exactly one end in `region`.
    pub fn crossing_pairs(&self, region: &[usize]) -> usize {
        let mut inside = vec![false; self.n_slots];
        for &s in region {
            inside[s] = true;
        }
        self.pairs.iter().filter(|p| inside[p.a] != inside[p.b]).count()
    }

    /// Explicit state vector as a tensor of single-slot legs (ids = slot index).
    pub fn to_dense(&self, limit: usize) -> Result<DenseTensor> {
        if self.n_slots > limit {
            return Err(HitError::SizeLimit {
                what: "pairing_to_dense slots",
                needed: self.n_slots,
                limit,
            });
        }
        let n = self.n_slots;
        let mut data = vec![C64::new(0.0, 0.0); 1 << n];
        // enumerate only the support: each pair contributes its nonzero entries
        let mut partial: Vec<(usize, C64)> = vec![(0, self.scalar)];
        for p in &self.pairs {
            let mut next = Vec::with_capacity(partial.len() * 4);
            for &(idx, amp) in &partial {
                for xa in 0..2 {
                    for xb in 0..2 {
                        let m = p.m[xa][xb];
                        if m.norm_sqr() == 0.0 {
                            continue;
                        }
                        let i = idx | (xa << (n - 1 - p.a)) | (xb << (n - 1 - p.b));
                        next.push((i, amp * m));
                    }
                }
            }
            partial = next;
        }
        for (i, a) in partial {
            data[i] = a;
        }
        DenseTensor::new((0..n as i64).map(|i| Leg::new(i, 1, Dir::Out)).collect(), data)
    }

    /// Normalized reduced density on `slots` (rows ordered as given), built as
    /// a tensor product over the pairs that touch them.
    pub fn reduced_density(&self, slots: &[usize]) -> Result<CMatrix> {
        let n = slots.len();
        if n > 12 {
            return Err(HitError::SizeLimit {
                what: "pairing reduced density slots",
                needed: n,
                limit: 12,
            });
        }
        let pos = |s: usize| slots.iter().position(|&x| x == s);
        let mut blocks: Vec<(Vec<usize>, CMatrix)> = Vec::new();
        for p in &self.pairs {
            let (ia, ib) = (pos(p.a), pos(p.b));
            let nrm = mat2_frob_sqr(&p.m);
            match (ia, ib) {
                (Some(a), Some(b)) => {
                    let v = [p.m[0][0], p.m[0][1], p.m[1][0], p.m[1][1]];
                    let rho = CMatrix::from_fn(4, 4, |r, c| v[r] * v[c].conj() / nrm);
                    blocks.push((vec![a, b], rho));
                }
                (Some(a), None) => {
                    let rho = CMatrix::from_fn(2, 2, |r, c| {
                        (p.m[r][0] * p.m[c][0].conj() + p.m[r][1] * p.m[c][1].conj()) / nrm
                    });
                    blocks.push((vec![a], rho));
                }
                (None, Some(b)) => {
                    let rho = CMatrix::from_fn(2, 2, |r, c| {
                        (p.m[0][r] * p.m[0][c].conj() + p.m[1][r] * p.m[1][c].conj()) / nrm
                    });
                    blocks.push((vec![b], rho));
                }
                (None, None) => {}
            }
        }
        if blocks.iter().map(|b| b.0.len()).sum::<usize>() != n {
            return Err(HitError::Region("slot outside the state or listed twice".into()));
        }
        let mut order = Vec::new();
        let mut rho = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for (p, b) in &blocks {
            order.extend(p.iter().copied());
            rho = rho.kronecker(b);
        }
        Ok(permute_operator(&rho, &order))
    }
}

/// Reorder the qubit axes of an operator: input axis `i` holds slot
/// `order[i]`; the output has slots in increasing order.
pub fn permute_operator(m: &CMatrix, order: &[usize]) -> CMatrix {
    let n = order.len();
    let d = 1usize << n;
    let mut data = Vec::with_capacity(d * d);
    for r in 0..d {
        for c in 0..d {
            data.push(m[(r, c)]);
        }
    }
    let big = 1000u32;
    let wires: Vec<u32> = order
        .iter()
        .map(|&s| s as u32)
        .chain(order.iter().map(|&s| s as u32 + big))
        .collect();
    let target: Vec<u32> = (0..n as u32).chain((0..n as u32).map(|s| s + big)).collect();
    let t = WireTensor::new(wires, data).permuted(&target);
    CMatrix::from_row_slice(d, d, &t.data)
}

/// Entropy of `region` slots for a pairing state (bits).
pub fn pairing_entropy(state: &PairingState, region: &[usize]) -> f64 {
    state.entropy(region)
}

pub fn pairing_to_dense(state: &PairingState) -> Result<DenseTensor> {
    state.to_dense(DENSE_SLOT_LIMIT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorcore::linalg::{bipartite_entropy_slots, reduced_density_slots};

    #[test]
    fn single_pair_vector() {
        let s = PairingState::new(2, vec![Pair::epsilon(0, 1)], C64::new(1.0, 0.0)).unwrap();
        let d = pairing_to_dense(&s).unwrap();
        let want = [0.0, 1.0, -1.0, 0.0];
        for (z, w) in d.data().iter().zip(want) {
            assert_eq!(*z, C64::new(0.0, w));
        }
        assert_eq!(s.norm_sqr(), 2.0);
        assert_eq!(pairing_entropy(&s, &[0]), 1.0);
        assert_eq!(pairing_entropy(&s, &[0, 1]), 0.0);
    }

    #[test]
    fn rejects_bad_matchings() {
        assert!(PairingState::new(3, vec![Pair::epsilon(0, 1)], C64::new(1.0, 0.0)).is_err());
        assert!(PairingState::new(2, vec![Pair::epsilon(0, 0)], C64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn reduced_density_matches_dense() {
        let s = PairingState::new(
            6,
            vec![Pair::epsilon(0, 3), Pair::epsilon(4, 1), Pair::epsilon(2, 5)],
            C64::new(0.0, 2.0),
        )
        .unwrap();
        let d = s.to_dense(26).unwrap();
        assert!((d.norm_sqr() - s.norm_sqr()).abs() < 1e-12);
        for slots in [vec![0usize, 1], vec![3, 0], vec![1, 2, 4], vec![5, 0, 3]] {
            let a = s.reduced_density(&slots).unwrap();
            let b = reduced_density_slots(d.data(), 6, &slots).unwrap();
            assert!((a - b).norm() < 1e-12, "{slots:?}");
            let e = bipartite_entropy_slots(d.data(), 6, &slots).unwrap();
            assert!((e - s.entropy(&slots)).abs() < 1e-12);
        }
    }

    #[test]
    fn json_roundtrip() {
        let mut s = PairingState::new(4, vec![Pair::epsilon(0, 2), Pair::epsilon(1, 3)], C64::new(-2.0, 0.0)).unwrap();
        s.perms.insert("7".into(), vec![1, 0]);
        let txt = serde_json::to_string(&s).unwrap();
        assert!(txt.contains("\"pairs\":[[0,2],[1,3]]"));
        let back: PairingState = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, s);
    }
}
