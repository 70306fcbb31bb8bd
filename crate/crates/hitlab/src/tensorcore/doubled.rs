use super::dense::{contract_with, DenseTensor};
use super::engine::ContractOptions;
use crate::{CMatrix, HitError, Result, C64};
use std::collections::HashSet;

/// Offset added to bra leg ids.
const BRA: i64 = 1 << 40;

/// A tensor network: tensors plus the leg pairs to contract.
#[derive(Clone, Debug)]
pub struct Network {
    pub tensors: Vec<DenseTensor>,
    pub plan: Vec<(i64, i64)>,
}

impl Network {
    pub fn new(tensors: Vec<DenseTensor>, plan: Vec<(i64, i64)>) -> Self {
        Network { tensors, plan }
    }

    /// Leg ids not joined by the plan, in order of appearance.
    pub fn open_legs(&self) -> Vec<i64> {
        let joined: HashSet<i64> = self.plan.iter().flat_map(|&(a, b)| [a, b]).collect();
        self.tensors
            .iter()
            .flat_map(|t| t.legs().iter().map(|l| l.id))
            .filter(|id| !joined.contains(id))
            .collect()
    }

    /// Insert the operator `op` on the wire joining legs `a` and `b`, acting
    /// in the direction a → b. `ids` names the two new legs.
    pub fn insert(&mut self, a: i64, b: i64, op: &CMatrix, ids: (i64, i64)) -> Result<()> {
        let pos = self
            .plan
            .iter()
            .position(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
            .ok_or(HitError::LegId(a))?;
        self.plan.remove(pos);
        let (x, y) = ids;
        let dir_a = self
            .tensors
            .iter()
            .flat_map(|t| t.legs())
            .find(|l| l.id == a)
            .ok_or(HitError::LegId(a))?
            .dir;
        // the operator consumes a's value on leg x and emits on leg y
        let t = DenseTensor::from_operator(y, x, op)?;
        let t = if dir_a == super::dense::Dir::Out {
            t
        } else {
            // flip directions so the plan stays well formed
            DenseTensor::new(
                t.legs().iter().map(|l| super::dense::Leg { dir: l.dir.flip(), ..*l }).collect(),
                t.data().to_vec(),
            )?
        };
        self.tensors.push(t);
        self.plan.push((a, x));
        self.plan.push((y, b));
        Ok(())
    }

    /// Contract to a dense state with open legs in `order`.
    pub fn contract(&self, order: &[i64], opts: ContractOptions) -> Result<DenseTensor> {
        contract_with(&self.tensors, &self.plan, opts)?.with_leg_order(order)
    }
}

/// Mixed reduced operator Tr_rest |ket⟩⟨bra| on the legs `keep`.
///
/// Both networks must expose the same open legs. Rows are indexed by the ket
/// legs in `keep` order, columns by the bra legs. Contraction uses product
/// factorization, so networks built from pair tensors stay cheap.
pub fn doubled_reduced(ket: &Network, bra: &Network, keep: &[i64]) -> Result<CMatrix> {
    let open_k = ket.open_legs();
    let mut open_b = bra.open_legs();
    let mut sorted_k = open_k.clone();
    sorted_k.sort_unstable();
    open_b.sort_unstable();
    if sorted_k != open_b {
        return Err(HitError::Dimension("ket and bra expose different legs".into()));
    }
    for id in keep {
        if !open_k.contains(id) {
            return Err(HitError::LegId(*id));
        }
    }
    let mut tensors = ket.tensors.clone();
    tensors.extend(bra.tensors.iter().map(|t| t.conj().relabeled(BRA)));
    let mut plan = ket.plan.clone();
    plan.extend(bra.plan.iter().map(|&(a, b)| (a + BRA, b + BRA)));
    for &id in &open_k {
        if !keep.contains(&id) {
            plan.push((id, id + BRA));
        }
    }
    let out = contract_with(&tensors, &plan, ContractOptions { factorize: true })?;
    let order: Vec<i64> = keep.iter().copied().chain(keep.iter().map(|id| id + BRA)).collect();
    let out = out.with_leg_order(&order)?;
    out.as_matrix(keep)
}

/// ⟨bra|ket⟩ for two networks with the same open legs.
pub fn network_overlap(ket: &Network, bra: &Network) -> Result<C64> {
    Ok(doubled_reduced(ket, bra, &[])?[(0, 0)])
}

/// Normalized reduced density of a network state on `keep`.
pub fn network_reduced_density(net: &Network, keep: &[i64]) -> Result<CMatrix> {
    let rho = doubled_reduced(net, net, keep)?;
    let tr = rho.trace();
    if tr.norm() == 0.0 {
        return Err(HitError::Spec("network state vanishes".into()));
    }
    Ok(rho / tr)
}
