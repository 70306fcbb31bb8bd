use super::engine::{contract_network, ContractOptions, WireTensor};
use crate::{CMatrix, HitError, Result, C64};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    In,
    Out,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::In => Dir::Out,
            Dir::Out => Dir::In,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    pub id: i64,
    pub k: usize,
    pub dir: Dir,
}

impl Leg {
    pub fn new(id: i64, k: usize, dir: Dir) -> Self {
        Leg { id, k, dir }
    }
}

/// Dense tensor over qubit slots grouped into legs.
///
/// Layout is row-major over all slots in leg order, slot 0 of the first leg
/// being the most significant bit. A single ε pair therefore reads
/// `(0, i, -i, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    legs: Vec<Leg>,
    data: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct TensorJson {
    legs: Vec<Leg>,
    data: Vec<[f64; 2]>,
}

impl Serialize for DenseTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TensorJson {
            legs: self.legs.clone(),
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DenseTensor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = TensorJson::deserialize(d)?;
        let data = j.data.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        DenseTensor::new(j.legs, data).map_err(serde::de::Error::custom)
    }
}

impl DenseTensor {
    pub fn new(legs: Vec<Leg>, data: Vec<C64>) -> Result<Self> {
        let mut ids = HashSet::new();
        for l in &legs {
            if !ids.insert(l.id) {
                return Err(HitError::LegId(l.id));
            }
        }
        let n: usize = legs.iter().map(|l| l.k).sum();
        if n >= usize::BITS as usize || data.len() != 1usize << n {
            return Err(HitError::Dimension(format!(
                "data length {} does not match 2^{}",
                data.len(),
                n
            )));
        }
        Ok(DenseTensor { legs, data })
    }

    pub fn zeros(legs: Vec<Leg>) -> Result<Self> {
        let n: usize = legs.iter().map(|l| l.k).sum();
        DenseTensor::new(legs, vec![C64::new(0.0, 0.0); 1 << n])
    }

    /// A tensor with `q` out-legs of `k` slots each, ids `0..q`.
    pub fn from_vertex_data(q: usize, k: usize, data: Vec<C64>) -> Result<Self> {
        DenseTensor::new((0..q as i64).map(|i| Leg::new(i, k, Dir::Out)).collect(), data)
    }

    /// An operator with an out-leg (rows) and an in-leg (columns).
    pub fn from_operator(out_id: i64, in_id: i64, m: &CMatrix) -> Result<Self> {
        let r = m.nrows();
        let c = m.ncols();
        if !r.is_power_of_two() || !c.is_power_of_two() {
            return Err(HitError::Dimension("operator sides must be powers of two".into()));
        }
        let legs = vec![
            Leg::new(out_id, r.trailing_zeros() as usize, Dir::Out),
            Leg::new(in_id, c.trailing_zeros() as usize, Dir::In),
        ];
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                data.push(m[(i, j)]);
            }
        }
        DenseTensor::new(legs, data)
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn n_slots(&self) -> usize {
        self.legs.iter().map(|l| l.k).sum()
    }

    /// Global slot positions occupied by leg `id`.
    pub fn slot_range(&self, id: i64) -> Result<std::ops::Range<usize>> {
        let mut off = 0;
        for l in &self.legs {
            if l.id == id {
                return Ok(off..off + l.k);
            }
            off += l.k;
        }
        Err(HitError::LegId(id))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scaled(&self, s: C64) -> DenseTensor {
        DenseTensor {
            legs: self.legs.clone(),
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Copy normalized to unit Euclidean norm.
    pub fn normalized(&self) -> DenseTensor {
        let n = self.norm_sqr().sqrt();
        self.scaled(C64::new(1.0 / n, 0.0))
    }

    pub fn conj(&self) -> DenseTensor {
        DenseTensor {
            legs: self.legs.iter().map(|l| Leg { dir: l.dir.flip(), ..*l }).collect(),
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// The same tensor with every leg id shifted by `offset`.
    pub fn relabeled(&self, offset: i64) -> DenseTensor {
        DenseTensor {
            legs: self.legs.iter().map(|l| Leg { id: l.id + offset, ..*l }).collect(),
            data: self.data.clone(),
        }
    }

    /// Reorder legs (by id). Data are permuted accordingly.
    pub fn with_leg_order(&self, ids: &[i64]) -> Result<DenseTensor> {
        if ids.len() != self.legs.len() {
            return Err(HitError::Dimension("leg order length".into()));
        }
        let mut wires_new = Vec::new();
        let mut legs = Vec::new();
        for &id in ids {
            let r = self.slot_range(id)?;
            legs.push(*self.legs.iter().find(|l| l.id == id).unwrap());
            wires_new.extend(r.map(|s| s as u32));
        }
        let wt = WireTensor::new((0..self.n_slots() as u32).collect(), self.data.clone());
        Ok(DenseTensor {
            legs,
            data: wt.permuted(&wires_new).data,
        })
    }

    /// Matrix view with the listed legs as rows and the rest as columns.
    pub fn as_matrix(&self, row_ids: &[i64]) -> Result<CMatrix> {
        let col_ids: Vec<i64> = self
            .legs
            .iter()
            .map(|l| l.id)
            .filter(|id| !row_ids.contains(id))
            .collect();
        let order: Vec<i64> = row_ids.iter().chain(col_ids.iter()).copied().collect();
        let t = self.with_leg_order(&order)?;
        let rbits: usize = row_ids.iter().map(|id| t.legs.iter().find(|l| l.id == *id).unwrap().k).sum();
        let r = 1usize << rbits;
        let c = t.data.len() / r;
        Ok(CMatrix::from_row_slice(r, c, &t.data))
    }
}

/// Hilbert–Schmidt inner product Σ conj(a)·b.
pub fn hs_inner(a: &DenseTensor, b: &DenseTensor) -> Result<C64> {
    let sig = |t: &DenseTensor| t.legs.iter().map(|l| (l.id, l.k)).collect::<Vec<_>>();
    if sig(a) != sig(b) {
        return Err(HitError::Dimension("leg signatures differ".into()));
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// Contract a list of tensors. `plan` pairs leg ids to be joined; paired legs
/// need equal slot counts and opposite directions, slot `i` of one leg meeting
/// slot `i` of the other. The result carries the unpaired legs in order of
/// appearance.
pub fn contract(network: &[DenseTensor], plan: &[(i64, i64)]) -> Result<DenseTensor> {
    contract_with(network, plan, ContractOptions::default())
}

pub fn contract_with(network: &[DenseTensor], plan: &[(i64, i64)], opts: ContractOptions) -> Result<DenseTensor> {
    let mut legs: HashMap<i64, (usize, Leg)> = HashMap::new();
    for (ti, t) in network.iter().enumerate() {
        for l in &t.legs {
            if legs.insert(l.id, (ti, *l)).is_some() {
                return Err(HitError::LegId(l.id));
            }
        }
    }
    let mut partner: HashMap<i64, i64> = HashMap::new();
    for &(a, b) in plan {
        let (_, la) = legs.get(&a).ok_or(HitError::LegId(a))?;
        let (_, lb) = legs.get(&b).ok_or(HitError::LegId(b))?;
        if la.k != lb.k {
            return Err(HitError::Dimension(format!("legs {a} and {b} have k {} and {}", la.k, lb.k)));
        }
        if la.dir == lb.dir {
            return Err(HitError::Dimension(format!("legs {a} and {b} have the same direction")));
        }
        if a == b || partner.insert(a, b).is_some() || partner.insert(b, a).is_some() {
            return Err(HitError::LegId(a));
        }
    }
    // wire label for (leg id, slot)
    let mut next = 0u32;
    let mut label: HashMap<(i64, usize), u32> = HashMap::new();
    let mut wires = Vec::new();
    let mut open_legs = Vec::new();
    let mut open_wires = Vec::new();
    for t in network {
        let mut tw = Vec::new();
        for l in &t.legs {
            let open = !partner.contains_key(&l.id);
            for s in 0..l.k {
                let w = if let Some(&w) = partner.get(&l.id).and_then(|p| label.get(&(*p, s))) {
                    w
                } else {
                    next += 1;
                    next - 1
                };
                label.insert((l.id, s), w);
                tw.push(w);
                if open {
                    open_wires.push(w);
                }
            }
            if open {
                open_legs.push(*l);
            }
        }
        wires.push(WireTensor::new(tw, t.data.clone()));
    }
    let out = contract_network(wires, &open_wires, opts);
    DenseTensor::new(open_legs, out.data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2kit::epsilon_pair;

    #[test]
    fn epsilon_loop_is_minus_two() {
        // ε_ab ε_ab summed: the conjugate-transpose pairing of the arc with itself
        let e = epsilon_pair();
        let mut f = e.relabeled(10);
        // join a-a and b-b with opposite directions
        f = DenseTensor::new(
            f.legs.iter().map(|l| Leg { dir: Dir::In, ..*l }).collect(),
            f.data.clone(),
        )
        .unwrap();
        let r = contract(&[e, f], &[(0, 10), (1, 11)]).unwrap();
        assert!(r.legs().is_empty());
        assert!((r.data()[0] - C64::new(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_contraction_is_noop() {
        let e = epsilon_pair();
        let id = DenseTensor::from_operator(20, 21, &CMatrix::identity(2, 2)).unwrap();
        let r = contract(&[e.clone(), id], &[(1, 21)]).unwrap();
        assert_eq!(r.data(), e.data());
        assert_eq!(r.legs()[1].id, 20);
    }

    #[test]
    fn hs_inner_of_epsilon() {
        let e = epsilon_pair();
        assert!((hs_inner(&e, &e).unwrap() - C64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_plans() {
        let e = epsilon_pair();
        let g = e.relabeled(5);
        assert!(contract(&[e.clone(), g.clone()], &[(0, 5)]).is_err()); // same direction
        assert!(contract(&[e.clone(), e.clone()], &[]).is_err()); // duplicate ids
        assert!(contract(&[e], &[(0, 99)]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let e = epsilon_pair();
        let s = serde_json::to_string(&e).unwrap();
        let back: DenseTensor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
