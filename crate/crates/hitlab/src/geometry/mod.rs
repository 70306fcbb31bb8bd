//! Geometric observables on HIT states: length, area and angle.
//!
//! Length weights follow the squared-expectation rule: a cut edge `x`
//! contributes `Σ_j √(j(j+1)) |⟨P^j_x⟩|²`, and joint terms of the second
//! moment use `|⟨P^j_x P^k_y⟩|²`. For a pair-product HIT the per-edge weight
//! reduces to the single-vertex constant `ℓ_j = √(j(j+1)) p_j²` with
//! `p_j = ⟨A|P^j_leg|A⟩`.

mod angle;
mod area;

pub use angle::{polygon_angle_sum, vertex_angle, AngleReport};
pub use area::{
    area_eigenvalue, computed_vertex_area_73, decompose_vertex, decompose_vertex_generic, grasp_area_oracle, reference_vertex_area_73,
    spin_basis, spin_basis_generic, vertex_area, AreaTerm, BasisElement, SpinBasisDecomposition, VertexAreaReport,
};

use crate::hit::HitSpec;
use crate::network::{dense_network, edge_leg_ids, vertex_leg_id, NetworkState};
use crate::su2kit::{spin_projectors, SpinLabel};
use crate::tensorcore::doubled::{doubled_reduced, network_overlap};
use crate::tensorcore::linalg::reduced_density;
use crate::tensorcore::Network;
use crate::tiling::{Cut, End};
use crate::{CMatrix, HitError, Result, C64};
use serde::Serialize;
use std::collections::BTreeSet;

/// One spin sector of a length report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LengthTerm {
    pub j: f64,
    /// ⟨P^j⟩ on the leg.
    pub probability: f64,
    /// √(j(j+1)) · probability².
    pub ell: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LengthReport {
    pub per_j: Vec<LengthTerm>,
    /// Σ_j ℓ_j
    pub c_a: f64,
    pub graph_length: usize,
    pub expectation: f64,
    pub variance: f64,
}

impl LengthReport {
    pub fn ell(&self, j: SpinLabel) -> f64 {
        self.per_j.iter().find(|t| SpinLabel::from_j(t.j) == j).map_or(0.0, |t| t.ell)
    }

    /// Σ_j ℓ_j (√(j(j+1)) − c_A), the variance per crossed edge.
    pub fn variance_per_edge(&self) -> f64 {
        self.per_j.iter().map(|t| t.ell * ((t.j * (t.j + 1.0)).sqrt() - self.c_a)).sum()
    }
}

fn eigen(j: f64) -> f64 {
    (j * (j + 1.0)).sqrt()
}

/// ℓ_j for the leg at position `leg` of the normalized vertex tensor. The
/// report covers a single crossed edge.
pub fn length_contribution(spec: &HitSpec, leg: usize) -> Result<LengthReport> {
    spec.validate()?;
    if leg >= spec.q {
        return Err(HitError::Region(format!("leg {leg} out of range 0..{}", spec.q)));
    }
    let a = spec.vertex_tensor()?.normalized();
    let rho = reduced_density(&a, &[leg as i64])?;
    let proj = spin_projectors(spec.k);
    let per_j: Vec<LengthTerm> = proj
        .entries
        .iter()
        .map(|e| {
            let p = (&rho * &e.projector).trace().re;
            LengthTerm {
                j: e.j.j(),
                probability: p,
                ell: eigen(e.j.j()) * p * p,
            }
        })
        .collect();
    let c_a = per_j.iter().map(|t| t.ell).sum();
    let mut r = LengthReport {
        per_j,
        c_a,
        graph_length: 1,
        expectation: c_a,
        variance: 0.0,
    };
    r.variance = r.variance_per_edge();
    Ok(r)
}

/// ⟨L_γ⟩ for a cut: each crossed edge contributes the constant of its leg at
/// the `ends.0` vertex. The variance uses the strip-free second moment.
pub fn length_expectation(state: &NetworkState, cut: &Cut) -> Result<LengthReport> {
    if state.spec.vertex_pairs().is_none() {
        return Err(HitError::Unsupported("length expectation needs a pair-product HIT".into()));
    }
    let mut per_leg: Vec<Option<LengthReport>> = vec![None; state.spec.q];
    let mut expectation = 0.0;
    let mut variance = 0.0;
    for &e in &cut.edges {
        let v = state.graph.edges.get(e).ok_or_else(|| HitError::Region(format!("edge {e} not in tiling")))?.ends.0;
        let pos = state.graph.slot_of(v, e).expect("edge listed at its vertex");
        if per_leg[pos].is_none() {
            per_leg[pos] = Some(length_contribution(&state.spec, pos)?);
        }
        let r = per_leg[pos].as_ref().unwrap();
        expectation += r.c_a;
        variance += r.variance_per_edge();
    }
    let base = length_contribution(&state.spec, 0)?;
    Ok(LengthReport {
        per_j: base.per_j,
        c_a: base.c_a,
        graph_length: cut.graph_length(),
        expectation,
        variance,
    })
}

/// Largest strip evaluated densely.
pub const STRIP_LIMIT: usize = 16;

/// Var(L_γ). Without a strip the closed form L_Γ·Σ_j ℓ_j(√(j(j+1)) − c_A) is
/// used; with a strip both moments come from dense contraction of the patch.
pub fn length_variance(state: &NetworkState, cut: &Cut, strip: &BTreeSet<usize>) -> Result<f64> {
    if strip.is_empty() {
        return Ok(length_expectation(state, cut)?.variance);
    }
    if strip.len() > STRIP_LIMIT {
        return Err(HitError::SizeLimit {
            what: "strip vertices",
            needed: strip.len(),
            limit: STRIP_LIMIT,
        });
    }
    let m = DenseLength::new(state)?.moments(cut)?;
    Ok(m.second - m.mean * m.mean)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LengthMoments {
    pub mean: f64,
    pub second: f64,
}

/// Where a projector is inserted.
#[derive(Clone, Copy, Debug)]
enum Site {
    /// Internal wire between a vertex leg and an edge-tensor leg.
    Wire(i64, i64),
    /// Open boundary leg.
    Open(i64),
}

/// Length observables by explicit projector insertion into the patch
/// network.
pub struct DenseLength {
    net: Network,
    norm: f64,
    k: usize,
    sites: Vec<Option<Site>>,
    projectors: Vec<(f64, CMatrix)>,
}

const PROBE: i64 = 1 << 36;

impl DenseLength {
    pub fn new(state: &NetworkState) -> Result<Self> {
        let (net, _) = dense_network(&state.graph, &state.spec, state.holonomies.as_ref())?;
        let norm = network_overlap(&net, &net)?.re;
        if norm <= 0.0 {
            return Err(HitError::Spec("network state vanishes".into()));
        }
        let q = state.spec.q;
        let sites = state
            .graph
            .edges
            .iter()
            .map(|e| {
                let v = e.ends.0;
                let a = vertex_leg_id(q, v, state.graph.slot_of(v, e.id)?);
                Some(match e.ends.1 {
                    End::Vertex(_) => Site::Wire(a, edge_leg_ids(e.id).0),
                    End::Boundary => Site::Open(a),
                })
            })
            .collect();
        let projectors = spin_projectors(state.spec.k)
            .entries
            .into_iter()
            .map(|e| (e.j.j(), e.projector))
            .collect();
        Ok(DenseLength {
            net,
            norm,
            k: state.spec.k,
            sites,
            projectors,
        })
    }

    fn site(&self, e: usize) -> Result<Site> {
        self.sites
            .get(e)
            .copied()
            .flatten()
            .ok_or_else(|| HitError::Region(format!("edge {e} not in tiling")))
    }

    /// ⟨ψ|Π O_x|ψ⟩/⟨ψ|ψ⟩ for operators on distinct edges.
    pub fn expectation(&self, ops: &[(usize, &CMatrix)]) -> Result<C64> {
        let mut ket = self.net.clone();
        let mut keep = Vec::new();
        let mut open_op = CMatrix::identity(1, 1);
        for (n, &(e, op)) in ops.iter().enumerate() {
            let d = 1usize << self.k;
            if op.nrows() != d || op.ncols() != d {
                return Err(HitError::Dimension(format!("operator must be {d}x{d}")));
            }
            match self.site(e)? {
                Site::Wire(a, b) => {
                    let id = PROBE + 2 * n as i64;
                    ket.insert(a, b, op, (id, id + 1))?;
                }
                Site::Open(a) => {
                    keep.push(a);
                    open_op = open_op.kronecker(op);
                }
            }
        }
        let m = doubled_reduced(&ket, &self.net, &keep)?;
        Ok((m * open_op).trace() / self.norm)
    }

    /// ⟨P^j_x⟩ for every spin sector on edge `e`.
    pub fn probabilities(&self, e: usize) -> Result<Vec<(f64, f64)>> {
        self.projectors
            .iter()
            .map(|(j, p)| Ok((*j, self.expectation(&[(e, p)])?.re)))
            .collect()
    }

    /// Mean and second moment of L_γ with squared-expectation weights.
    pub fn moments(&self, cut: &Cut) -> Result<LengthMoments> {
        let edges: Vec<usize> = cut.edges.iter().copied().collect();
        let mut mean = 0.0;
        let mut second = 0.0;
        for &x in &edges {
            for (j, p) in self.probabilities(x)? {
                mean += eigen(j) * p * p;
                second += j * (j + 1.0) * p * p;
            }
        }
        for (i, &x) in edges.iter().enumerate() {
            for &y in &edges[i + 1..] {
                for (j, pj) in &self.projectors {
                    for (l, pl) in &self.projectors {
                        let w = eigen(*j) * eigen(*l);
                        if w == 0.0 {
                            continue;
                        }
                        let v = self.expectation(&[(x, pj), (y, pl)])?;
                        second += 2.0 * w * v.norm_sqr();
                    }
                }
            }
        }
        Ok(LengthMoments { mean, second })
    }
}
