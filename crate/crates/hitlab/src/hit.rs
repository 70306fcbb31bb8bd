//! Vertex/edge tensor pairs (HITs) and checks of their defining constraints.
//!
//! Every leg of the q-valent vertex tensor A carries k qubit slots. Slot `s`
//! of leg `i` is vertex slot `i·k + s`. The edge tensor B is a permutation
//! `π` of the k slots, taken relative to the planar straight-through
//! connection. Seen from the two ends of an edge the slot order is mirrored
//! (`reflection`), so slot `s` at one end meets slot `ρ(π(s))` at the other.

use crate::nogo::{eigencheck, Symmetry};
use crate::su2kit::random_su2;
use crate::tensorcore::engine::WireTensor;
use crate::tensorcore::linalg::reduced_density;
use crate::tensorcore::{network_reduced_density, DenseTensor, Dir, Leg, Network, Pair, PairingState};
use crate::{CMatrix, HitError, Result, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// How the vertex tensor is built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Opposite legs share k pairs, slot by slot.
    Star,
    /// Slot 0 of leg i pairs with slot 1 of leg i+1 (k = 2).
    LeftRight,
    /// For each shift ℓ, leg i pairs with leg i+ℓ.
    LShift(Vec<usize>),
    /// Slot-disjoint product of HITs with equal valence.
    TensorProduct(Vec<HitSpec>),
    /// Arbitrary dense vertex tensor with q legs of k slots.
    Custom(DenseTensor),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HitSpec {
    pub q: usize,
    pub k: usize,
    pub family: Family,
    /// Edge slot permutation.
    #[serde(rename = "B")]
    pub b: Vec<usize>,
}

pub fn make_star(q: usize, k: usize) -> Result<HitSpec> {
    if q < 2 || !q.is_multiple_of(2) || k == 0 {
        return Err(HitError::Spec(format!("star needs even q ≥ 2 and k ≥ 1, got q={q}, k={k}")));
    }
    Ok(HitSpec {
        q,
        k,
        family: Family::Star,
        b: (0..k).collect(),
    })
}

pub fn make_left_right(q: usize) -> Result<HitSpec> {
    if q < 3 {
        return Err(HitError::Spec(format!("left/right needs q ≥ 3, got {q}")));
    }
    Ok(HitSpec {
        q,
        k: 2,
        family: Family::LeftRight,
        b: vec![1, 0],
    })
}

/// Slot layout of an l-shift leg: one `a` slot per shift, then the
/// self-paired slot for ℓ = q/2, then the `b` slots in reverse order.
fn l_shift_layout(q: usize, shifts: &[usize]) -> (usize, Vec<usize>) {
    let half = q.is_multiple_of(2) && shifts.contains(&(q / 2));
    let m = shifts.len() - usize::from(half);
    (2 * m + usize::from(half), shifts.iter().copied().filter(|&l| !(q.is_multiple_of(2) && l == q / 2)).collect())
}

pub fn make_l_shift(q: usize, shifts: &[usize]) -> Result<HitSpec> {
    if q < 2 {
        return Err(HitError::Spec(format!("l-shift needs q ≥ 2, got {q}")));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &l in shifts {
        if l == 0 || l > q / 2 || !seen.insert(l) {
            return Err(HitError::Spec(format!("invalid shift {l} for q={q}")));
        }
    }
    let (k, two_sided) = l_shift_layout(q, shifts);
    let mut b: Vec<usize> = (0..k).collect();
    if let Some(t) = two_sided.iter().position(|&l| l == 1) {
        b.swap(t, k - 1 - t);
    }
    Ok(HitSpec {
        q,
        k,
        family: Family::LShift(shifts.to_vec()),
        b,
    })
}

pub fn hit_tensor_product(a: &HitSpec, b: &HitSpec) -> Result<HitSpec> {
    if a.q != b.q {
        return Err(HitError::Spec(format!("valence mismatch {} vs {}", a.q, b.q)));
    }
    if b.k == 0 {
        return Ok(a.clone());
    }
    if a.k == 0 {
        return Ok(b.clone());
    }
    let mut perm = a.b.clone();
    perm.extend(b.b.iter().map(|&s| s + a.k));
    Ok(HitSpec {
        q: a.q,
        k: a.k + b.k,
        family: Family::TensorProduct(vec![a.clone(), b.clone()]),
        b: perm,
    })
}

impl HitSpec {
    /// Spec with no slots; neutral for tensor products.
    pub fn trivial(q: usize) -> HitSpec {
        HitSpec {
            q,
            k: 0,
            family: Family::LShift(Vec::new()),
            b: Vec::new(),
        }
    }

    pub fn custom(tensor: DenseTensor, b: Vec<usize>) -> Result<HitSpec> {
        let q = tensor.legs().len();
        let k = tensor.legs().first().map_or(0, |l| l.k);
        let s = HitSpec {
            q,
            k,
            family: Family::Custom(tensor),
            b,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<HitSpec> {
        let h: HitSpec = serde_json::from_str(s)?;
        h.validate()?;
        Ok(h)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let mut sorted = self.b.clone();
        sorted.sort_unstable();
        if sorted != (0..self.k).collect::<Vec<_>>() {
            return Err(HitError::Spec(format!("B {:?} is not a permutation of {} slots", self.b, self.k)));
        }
        let expect = match &self.family {
            Family::Star => {
                if !self.q.is_multiple_of(2) {
                    return Err(HitError::Spec(format!("star needs even q, got {}", self.q)));
                }
                self.k
            }
            Family::LeftRight => 2,
            Family::LShift(sh) => make_l_shift(self.q, sh)?.k,
            Family::TensorProduct(fs) => {
                for f in fs {
                    if f.q != self.q {
                        return Err(HitError::Spec("factor valence mismatch".into()));
                    }
                    f.validate()?;
                }
                fs.iter().map(|f| f.k).sum()
            }
            Family::Custom(t) => {
                if t.legs().len() != self.q || t.legs().iter().any(|l| l.k != self.k) {
                    return Err(HitError::Spec(format!("custom tensor is not {} legs of {} slots", self.q, self.k)));
                }
                self.k
            }
        };
        if expect != self.k {
            return Err(HitError::Spec(format!("family needs k={expect}, spec has k={}", self.k)));
        }
        Ok(())
    }

    /// Mirror map of slot labels between the two ends of an edge.
    pub fn reflection(&self) -> Vec<usize> {
        match &self.family {
            Family::TensorProduct(fs) => {
                let mut out = Vec::with_capacity(self.k);
                let mut off = 0;
                for f in fs {
                    out.extend(f.reflection().iter().map(|&s| s + off));
                    off += f.k;
                }
                out
            }
            _ => (0..self.k).rev().collect(),
        }
    }

    /// Effective edge wiring: slot `s` at one end meets slot `wiring[s]` at
    /// the other.
    pub fn wiring(&self) -> Vec<usize> {
        let r = self.reflection();
        self.b.iter().map(|&p| r[p]).collect()
    }

    /// Oriented iε pairs of the vertex tensor in vertex slot numbering, or
    /// None for dense customs.
    pub fn vertex_pairs(&self) -> Option<Vec<(usize, usize)>> {
        let (q, k) = (self.q, self.k);
        let at = |leg: usize, s: usize| (leg % q) * k + s;
        match &self.family {
            Family::Star => Some(
                (0..q / 2)
                    .flat_map(|i| (0..k).map(move |s| (at(i, s), at(i + q / 2, s))))
                    .collect(),
            ),
            Family::LeftRight => Some((0..q).map(|i| (at(i, 0), at(i + 1, 1))).collect()),
            Family::LShift(shifts) => {
                let (_, two_sided) = l_shift_layout(q, shifts);
                let mut out = Vec::new();
                for (t, &l) in two_sided.iter().enumerate() {
                    for i in 0..q {
                        out.push((at(i, t), at(i + l, k - 1 - t)));
                    }
                }
                if q % 2 == 0 && shifts.contains(&(q / 2)) {
                    let c = two_sided.len();
                    for i in 0..q / 2 {
                        out.push((at(i, c), at(i + q / 2, c)));
                    }
                }
                Some(out)
            }
            Family::TensorProduct(fs) => {
                let mut out = Vec::new();
                let mut off = 0;
                for f in fs {
                    let fk = f.k;
                    let remap = |x: usize| (x / fk) * k + off + x % fk;
                    for (a, b) in f.vertex_pairs()? {
                        out.push((remap(a), remap(b)));
                    }
                    off += fk;
                }
                Some(out)
            }
            Family::Custom(_) => None,
        }
    }

    /// Pairing state of a single vertex (slots in vertex numbering).
    pub fn vertex_pairing(&self) -> Option<PairingState> {
        let pairs = self.vertex_pairs()?;
        let ps = pairs.into_iter().map(|(a, b)| Pair::epsilon(a, b)).collect();
        PairingState::new(self.q * self.k, ps, C64::new(1.0, 0.0)).ok()
    }

    /// Unnormalized vertex tensor with legs `0..q`.
    pub fn vertex_tensor(&self) -> Result<DenseTensor> {
        let (q, k) = (self.q, self.k);
        if let Some(p) = self.vertex_pairing() {
            let d = p.to_dense(usize::MAX)?;
            return DenseTensor::from_vertex_data(q, k, d.into_data());
        }
        match &self.family {
            Family::Custom(t) => {
                let ids: Vec<i64> = t.legs().iter().map(|l| l.id).collect();
                DenseTensor::from_vertex_data(q, k, t.with_leg_order(&ids)?.into_data())
            }
            Family::TensorProduct(fs) => {
                let mut acc = WireTensor::scalar(C64::new(1.0, 0.0));
                let mut off = 0;
                for f in fs {
                    let fk = f.k;
                    let wires = (0..q * fk).map(|x| ((x / fk) * k + off + x % fk) as u32).collect();
                    let t = WireTensor::new(wires, f.vertex_tensor()?.into_data());
                    acc = crate::tensorcore::engine::contract_pair(&acc, &t);
                    off += fk;
                }
                let order: Vec<u32> = (0..(q * k) as u32).collect();
                DenseTensor::from_vertex_data(q, k, acc.permuted(&order).data)
            }
            _ => unreachable!("pairing families always have pairs"),
        }
    }

    /// Edge tensor with legs (`id_a`, `id_b`), both inward, optionally
    /// carrying the holonomy `g` on every slot.
    pub fn edge_tensor(&self, id_a: i64, id_b: i64, g: Option<&CMatrix>) -> Result<DenseTensor> {
        let k = self.k;
        let f = self.wiring();
        let d = 1usize << k;
        let bit = |x: usize, s: usize| (x >> (k - 1 - s)) & 1;
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for x in 0..d {
            for y in 0..d {
                let mut amp = C64::new(1.0, 0.0);
                for (s, &fs) in f.iter().enumerate() {
                    let (a, b) = (bit(x, s), bit(y, fs));
                    amp *= match g {
                        Some(g) => g[(a, b)],
                        None => C64::new(if a == b { 1.0 } else { 0.0 }, 0.0),
                    };
                }
                data[x * d + y] = amp;
            }
        }
        DenseTensor::new(vec![Leg::new(id_a, k, Dir::In), Leg::new(id_b, k, Dir::In)], data)
    }
}

/// One named pass/fail check with its residual.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(name: &str, residual: f64, tol: f64) -> Check {
        Check {
            name: name.into(),
            pass: residual <= tol,
            residual,
            note: None,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}

fn max_dev_from_identity(rho: &CMatrix, scale: f64) -> f64 {
    let n = rho.nrows();
    let mut m: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let want = if r == c { scale } else { 0.0 };
            m = m.max((rho[(r, c)] - C64::new(want, 0.0)).norm());
        }
    }
    m
}

/// Cyclic symmetry of A (up to a global phase, reported in the note) and
/// exchange symmetry of B.
pub fn verify_cyclic(spec: &HitSpec) -> Result<Report> {
    spec.validate()?;
    let (q, k) = (spec.q, spec.k);
    let mut rep = Report::default();
    let mut check = if let Some(pairs) = spec.vertex_pairs() {
        let key = |(a, b): (usize, usize)| if a < b { ((a, b), 1) } else { ((b, a), -1) };
        let orig: BTreeMap<(usize, usize), i32> = pairs.iter().map(|&p| key(p)).collect();
        let rot = |x: usize| ((x / k + 1) % q) * k + x % k;
        let mut phase = 1;
        let mut ok = true;
        for &(a, b) in &pairs {
            let (kk, sign) = key((rot(a), rot(b)));
            match orig.get(&kk) {
                Some(&s0) => phase *= s0 * sign,
                None => ok = false,
            }
        }
        let mut c = Check::new("cyclic", if ok { 0.0 } else { 1.0 }, 0.0);
        if ok {
            c.note = Some(format!("phase {phase:+}"));
        }
        c
    } else {
        let a = spec.vertex_tensor()?;
        let order: Vec<i64> = std::iter::once(q as i64 - 1).chain(0..q as i64 - 1).collect();
        let r = a.with_leg_order(&order)?;
        let nrm = a.norm_sqr();
        let lam: C64 = a.data().iter().zip(r.data()).map(|(x, y)| x.conj() * y).sum::<C64>() / nrm;
        let res = r
            .data()
            .iter()
            .zip(a.data())
            .map(|(y, x)| (y - lam * x).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / nrm.sqrt();
        let res = res.max((lam.norm() - 1.0).abs());
        let mut c = Check::new("cyclic", res, crate::TOL);
        c.note = Some(format!("phase {:.6}{:+.6}i", lam.re, lam.im));
        c
    };
    check.name = "cyclic_a".into();
    rep.checks.push(check);
    let f = spec.wiring();
    let invol = f.iter().enumerate().all(|(s, &t)| f[t] == s);
    rep.checks.push(Check::new("symmetric_b", if invol { 0.0 } else { 1.0 }, 0.0));
    Ok(rep)
}

/// Invariance of a tensor state under a symmetry, N̂|ψ⟩ = c|ψ⟩. For SU(2)
/// all three generators must give c = 0.
pub fn verify_invariance(tensor: &DenseTensor, sym: &Symmetry) -> Result<Report> {
    let mut rep = Report::default();
    let total: usize = tensor.data().len();
    for (i, (g, want)) in sym.generators().into_iter().enumerate() {
        if g.dims().iter().product::<usize>() != total {
            return Err(HitError::Dimension("generator does not match the tensor".into()));
        }
        let e = eigencheck(tensor.data(), &g, crate::TOL)?;
        let mut res = e.residual;
        if let Some(w) = want {
            res = res.max((e.c - C64::new(w, 0.0)).norm());
        }
        let mut c = Check::new(&format!("generator_{i}"), res, crate::TOL);
        c.note = Some(format!("c = {:.9}", e.c.re));
        rep.checks.push(c);
    }
    Ok(rep)
}

/// Options for [`verify_isometries_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    /// Also run the two-vertex check with a random SU(2) holonomy on the
    /// shared edge drawn from this seed.
    pub holonomy_seed: Option<u64>,
}

/// Two-vertex network A–B–A joined along v's last leg and w's leg 1. Leg
/// ids are `0..q` for v and `100..100+q` for w.
pub fn two_vertex_network(spec: &HitSpec, g: Option<&CMatrix>) -> Result<Network> {
    let q = spec.q as i64;
    let a = spec.vertex_tensor()?;
    let w = a.relabeled(100);
    let e = spec.edge_tensor(1000, 1001, g)?;
    Ok(Network::new(vec![a, w, e], vec![(q - 1, 1000), (101, 1001)]))
}

fn aba_residual(net: &Network, spec: &HitSpec) -> Result<f64> {
    let q = spec.q as i64;
    let scale = 1.0 / (1u64 << (2 * spec.k)) as f64;
    // outer legs next to the shared edge on either side
    let sides = [(0, 100), ((q - 2).rem_euclid(q), 100 + 2 % q)];
    let mut worst: f64 = 0.0;
    for (x, y) in sides {
        let rho = network_reduced_density(net, &[x, y])?;
        worst = worst.max(max_dev_from_identity(&rho, scale));
    }
    Ok(worst)
}

/// The isometry relations: A is 1-isometric, B is unitary and A–B–A is an
/// isometry from the two outer legs next to the shared edge.
pub fn verify_isometries(spec: &HitSpec) -> Result<Report> {
    verify_isometries_with(spec, VerifyOptions::default())
}

pub fn verify_isometries_with(spec: &HitSpec, opts: VerifyOptions) -> Result<Report> {
    spec.validate()?;
    let mut rep = Report::default();
    let a = spec.vertex_tensor()?.normalized();
    let scale = 1.0 / (1u64 << spec.k) as f64;
    let mut worst: f64 = 0.0;
    for leg in 0..spec.q as i64 {
        let rho = reduced_density(&a, &[leg])?;
        worst = worst.max(max_dev_from_identity(&rho, scale));
    }
    rep.checks.push(Check::new("one_isometry_a", worst, crate::TOL));

    let e = spec.edge_tensor(0, 1, None)?.as_matrix(&[0])?;
    let u = e.adjoint() * &e;
    rep.checks.push(Check::new("unitary_b", max_dev_from_identity(&u, 1.0), crate::TOL));

    let net = two_vertex_network(spec, None)?;
    rep.checks.push(Check::new("aba_isometry", aba_residual(&net, spec)?, crate::TOL));

    if let Some(seed) = opts.holonomy_seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_su2(&mut rng);
        let net = two_vertex_network(spec, Some(&g))?;
        rep.checks.push(Check::new("aba_isometry_holonomy", aba_residual(&net, spec)?, crate::TOL));
    }
    Ok(rep)
}

/// Cyclic, SU(2) and isometry checks together.
pub fn verify_all(spec: &HitSpec, opts: VerifyOptions) -> Result<Report> {
    let mut rep = verify_cyclic(spec)?;
    let a = spec.vertex_tensor()?;
    let mut inv = verify_invariance(&a, &Symmetry::su2_qubits(a.n_slots()))?;
    for c in inv.checks.iter_mut() {
        c.name = format!("su2_{}", c.name);
    }
    rep.extend(inv);
    rep.extend(verify_isometries_with(spec, opts)?);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorcore::linalg::reduced_density;

    fn examples() -> Vec<HitSpec> {
        let lr4 = make_left_right(4).unwrap();
        vec![
            make_star(8, 1).unwrap(),
            make_star(4, 2).unwrap(),
            make_left_right(3).unwrap(),
            lr4.clone(),
            make_l_shift(5, &[1]).unwrap(),
            make_l_shift(5, &[1, 2]).unwrap(),
            hit_tensor_product(&lr4, &make_star(4, 1).unwrap()).unwrap(),
        ]
    }

    #[test]
    fn all_examples_pass_everything() {
        for s in examples() {
            let r = verify_all(&s, VerifyOptions { holonomy_seed: Some(3) }).unwrap();
            assert!(r.pass(), "{:?}: {:#?}", s.family, r);
        }
    }

    #[test]
    fn left_right_with_identity_b_fails_aba() {
        let mut s = make_left_right(3).unwrap();
        s.b = vec![0, 1];
        let r = verify_isometries(&s).unwrap();
        assert!(r.get("one_isometry_a").unwrap().pass);
        assert!(r.get("unitary_b").unwrap().pass);
        assert!(!r.get("aba_isometry").unwrap().pass);
    }

    #[test]
    fn star_with_identity_b_passes() {
        let r = verify_isometries(&make_star(4, 1).unwrap()).unwrap();
        assert!(r.pass());
    }

    #[test]
    fn star_pairs_opposite_legs() {
        let s = make_star(8, 1).unwrap();
        assert_eq!(s.vertex_pairs().unwrap(), vec![(0, 4), (1, 5), (2, 6), (3, 7)]);
        let s2 = make_star(2, 1).unwrap();
        assert_eq!(s2.vertex_pairs().unwrap(), vec![(0, 1)]);
        assert!(make_star(5, 1).is_err());
    }

    #[test]
    fn star_marginals_on_adjacent_legs_are_maximally_mixed() {
        for q in [2, 4, 6, 8] {
            let a = make_star(q, 1).unwrap().vertex_tensor().unwrap().normalized();
            for start in 0..q as i64 {
                for len in 1..=(q as i64 / 2) {
                    let keep: Vec<i64> = (0..len).map(|i| (start + i) % q as i64).collect();
                    let rho = reduced_density(&a, &keep).unwrap();
                    let d = rho.nrows() as f64;
                    assert!(max_dev_from_identity(&rho, 1.0 / d) < 1e-12, "q={q} {keep:?}");
                }
            }
        }
    }

    #[test]
    fn left_right_pairs_neighbors() {
        let s = make_left_right(3).unwrap();
        assert_eq!(s.vertex_pairs().unwrap(), vec![(0, 3), (2, 5), (4, 1)]);
        assert_eq!(s.b, vec![1, 0]);
        assert!(make_left_right(2).is_err());
    }

    #[test]
    fn l_shift_special_cases() {
        let s = make_l_shift(5, &[1]).unwrap();
        assert_eq!(s.k, 2);
        assert_eq!(s.vertex_pairs(), make_left_right(5).unwrap().vertex_pairs());
        assert_eq!(s.b, vec![1, 0]);
        let s = make_l_shift(5, &[1, 2]).unwrap();
        assert_eq!(s.k, 4);
        assert_eq!(s.b, vec![3, 1, 2, 0]);
        let half = make_l_shift(6, &[3]).unwrap();
        let star = make_star(6, 1).unwrap();
        assert_eq!(half.vertex_pairs(), star.vertex_pairs());
        assert_eq!(half.b, star.b);
        assert!(make_l_shift(5, &[3]).is_err());
        assert!(make_l_shift(5, &[0]).is_err());
        assert!(make_l_shift(5, &[1, 1]).is_err());
    }

    #[test]
    fn tensor_product_with_trivial_is_identity() {
        let x = make_left_right(4).unwrap();
        assert_eq!(hit_tensor_product(&x, &HitSpec::trivial(4)).unwrap(), x);
        assert_eq!(hit_tensor_product(&HitSpec::trivial(4), &x).unwrap(), x);
        assert!(hit_tensor_product(&x, &make_star(6, 1).unwrap()).is_err());
    }

    #[test]
    fn example_four_has_three_slots() {
        let p = hit_tensor_product(&make_left_right(4).unwrap(), &make_star(4, 1).unwrap()).unwrap();
        assert_eq!(p.k, 3);
        assert_eq!(p.b, vec![1, 0, 2]);
        // dense product path agrees with the pairing path
        let mut dense_factor = make_star(4, 1).unwrap();
        dense_factor.family = Family::Custom(dense_factor.vertex_tensor().unwrap());
        let p2 = hit_tensor_product(&make_left_right(4).unwrap(), &dense_factor).unwrap();
        assert!(p2.vertex_pairs().is_none());
        assert_eq!(p2.vertex_tensor().unwrap(), p.vertex_tensor().unwrap());
    }

    #[test]
    fn cyclic_failure_for_non_symmetric_custom() {
        // legs 1 and 2 share a pair, leg 0 is |0⟩
        let mut data = vec![C64::new(0.0, 0.0); 8];
        data[0b001] = C64::new(0.0, 1.0);
        data[0b010] = C64::new(0.0, -1.0);
        let t = DenseTensor::from_vertex_data(3, 1, data).unwrap();
        let s = HitSpec::custom(t, vec![0]).unwrap();
        assert!(!verify_cyclic(&s).unwrap().get("cyclic_a").unwrap().pass);
    }

    #[test]
    fn star_rotation_phase_is_reported() {
        let r = verify_cyclic(&make_star(4, 1).unwrap()).unwrap();
        assert!(r.pass());
        assert_eq!(r.get("cyclic_a").unwrap().note.as_deref(), Some("phase -1"));
        let r = verify_cyclic(&make_left_right(3).unwrap()).unwrap();
        assert_eq!(r.get("cyclic_a").unwrap().note.as_deref(), Some("phase +1"));
    }

    #[test]
    fn dense_cyclic_agrees_with_pairing_cyclic() {
        for s in examples() {
            let mut d = s.clone();
            d.family = Family::Custom(s.vertex_tensor().unwrap());
            if d.q * d.k > 14 {
                continue;
            }
            assert!(verify_cyclic(&d).unwrap().get("cyclic_a").unwrap().pass, "{:?}", s.family);
        }
    }

    #[test]
    fn superposition_breaks_isometry() {
        // left/right plus star on q=4, k=2: invariant and cyclic, not a HIT
        let ta = make_left_right(4).unwrap().vertex_tensor().unwrap();
        let tb = make_star(4, 2).unwrap().vertex_tensor().unwrap();
        let sum: Vec<C64> = ta.data().iter().zip(tb.data()).map(|(x, y)| x + y).collect();
        let t = DenseTensor::from_vertex_data(4, 2, sum).unwrap();
        assert!(verify_invariance(&t, &Symmetry::su2_qubits(8)).unwrap().pass());
        let s = HitSpec::custom(t, vec![1, 0]).unwrap();
        assert!(verify_cyclic(&s).unwrap().pass());
        assert!(!verify_isometries(&s).unwrap().pass());
    }

    #[test]
    fn product_state_is_not_su2_invariant() {
        let mut data = vec![C64::new(0.0, 0.0); 4];
        data[0] = C64::new(1.0, 0.0);
        let t = DenseTensor::from_vertex_data(2, 1, data).unwrap();
        let r = verify_invariance(&t, &Symmetry::su2_qubits(2)).unwrap();
        // |00⟩ is a Jz eigenstate with c = 1 and not annihilated by Jx
        assert!(!r.pass());
        let jz = verify_invariance(&t, &Symmetry::U1(crate::nogo::GeneratorSpec::total_spin(&[2, 2], 2))).unwrap();
        assert!(jz.pass());
        let jx = verify_invariance(&t, &Symmetry::U1(crate::nogo::GeneratorSpec::total_spin(&[2, 2], 0))).unwrap();
        assert!(!jx.pass());
    }

    #[test]
    fn json_roundtrip() {
        for s in examples() {
            let j = s.to_json().unwrap();
            assert_eq!(HitSpec::from_json(&j).unwrap(), s);
        }
        let j = r#"{"q":3,"k":2,"family":"left_right","B":[1,0]}"#;
        assert_eq!(HitSpec::from_json(j).unwrap(), make_left_right(3).unwrap());
        let j = r#"{"q":5,"k":4,"family":{"l_shift":[1,2]},"B":[3,1,2,0]}"#;
        assert_eq!(HitSpec::from_json(j).unwrap(), make_l_shift(5, &[1, 2]).unwrap());
        assert!(HitSpec::from_json(r#"{"q":3,"k":2,"family":"left_right","B":[0,0]}"#).is_err());
    }
}
