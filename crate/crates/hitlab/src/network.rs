//! Boundary states of HIT networks on tiling patches.
//!
//! The scalable path composes the per-vertex pair matchings through the edge
//! wirings into a pairing of boundary slots ("chain walking"). Chains that
//! close on themselves become loop factors in the scalar. A dense network
//! builder provides the oracle path for small patches and for operator
//! insertions.

use crate::hit::HitSpec;
use crate::par::{self, Exec};
use crate::su2kit::random_su2;
use crate::tensorcore::pairing::{mat2_from, mat2_mul, mat2_transpose, Mat2};
use crate::tensorcore::{DenseTensor, Network, Pair, PairingState};
use crate::tiling::{minimal_cut, BoundaryRegion, End, TilingGraph};
use crate::{CMatrix, HitError, Result, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// Per-edge SU(2) holonomies, keyed by closed-edge id. Each acts as g on
/// every slot of the edge, oriented from `ends.0` to `ends.1`.
pub type Holonomies = BTreeMap<usize, CMatrix>;

/// Seeded Haar-random holonomies on every closed edge.
pub fn random_holonomies(graph: &TilingGraph, seed: u64) -> Holonomies {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    graph.closed_edges().map(|e| (e.id, random_su2(&mut rng))).collect()
}

#[derive(Clone, Debug)]
pub struct NetworkState {
    pub graph: TilingGraph,
    pub spec: HitSpec,
    /// Pairing over boundary slots; slot `b·k + s` is slot `s` of the leg at
    /// boundary position `b`.
    pub pairing: PairingState,
    pub holonomies: Option<Holonomies>,
    /// Number of closed chains folded into the scalar.
    pub loops: usize,
}

impl NetworkState {
    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn n_boundary_slots(&self) -> usize {
        self.graph.n_boundary() * self.spec.k
    }

    /// Boundary slots of a region.
    pub fn region_slots(&self, region: &BoundaryRegion) -> Vec<usize> {
        let k = self.spec.k;
        region.indices().iter().flat_map(|&b| (0..k).map(move |s| b * k + s)).collect()
    }
}

fn check_valence(graph: &TilingGraph, spec: &HitSpec) -> Result<()> {
    spec.validate()?;
    if spec.q != graph.q {
        return Err(HitError::Spec(format!("spec valence {} on a q={} tiling", spec.q, graph.q)));
    }
    Ok(())
}

/// Where a vertex slot leads when leaving its vertex.
#[derive(Clone, Copy)]
enum Link {
    /// (other node, edge id, leaving from the `ends.0` side)
    Edge(usize, usize, bool),
    Boundary(usize),
}

pub fn assemble(graph: &TilingGraph, spec: &HitSpec) -> Result<NetworkState> {
    assemble_with(graph, spec, None)
}

/// Resolve the boundary pairing by walking chains through the network.
pub fn assemble_with(graph: &TilingGraph, spec: &HitSpec, holonomies: Option<&Holonomies>) -> Result<NetworkState> {
    check_valence(graph, spec)?;
    let pairs = spec
        .vertex_pairs()
        .ok_or_else(|| HitError::Unsupported("chain assembly needs a pair-product vertex tensor".into()))?;
    let (q, k) = (spec.q, spec.k);
    let nv = graph.n_vertices();
    let node = |v: usize, pos: usize, s: usize| (v * q + pos) * k + s;
    let n_nodes = nv * q * k;
    let eps = crate::tensorcore::pairing::epsilon_mat();

    // partner inside the vertex and whether the node is the first end
    let mut mate = vec![(usize::MAX, true); n_nodes];
    for v in 0..nv {
        for &(a, b) in &pairs {
            let (na, nb) = (v * q * k + a, v * q * k + b);
            mate[na] = (nb, true);
            mate[nb] = (na, false);
        }
    }
    let f = spec.wiring();
    let mut link = vec![Link::Boundary(0); n_nodes];
    let bindex: BTreeMap<usize, usize> = graph.boundary_legs.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    for e in &graph.edges {
        match e.ends {
            (v, End::Vertex(w)) => {
                let pv = graph.slot_of(v, e.id).unwrap();
                let pw = graph.slot_of(w, e.id).unwrap();
                for (s, &fs) in f.iter().enumerate() {
                    let (a, b) = (node(v, pv, s), node(w, pw, fs));
                    link[a] = Link::Edge(b, e.id, true);
                    link[b] = Link::Edge(a, e.id, false);
                }
            }
            (v, End::Boundary) => {
                let pv = graph.slot_of(v, e.id).unwrap();
                let b = bindex[&e.id];
                for s in 0..k {
                    link[node(v, pv, s)] = Link::Boundary(b * k + s);
                }
            }
        }
    }
    let edge_mat = |e: usize, forward: bool| -> Option<Mat2> {
        let g = mat2_from(holonomies?.get(&e)?);
        Some(if forward { g } else { mat2_transpose(&g) })
    };
    let pair_mat = |first: bool| if first { eps } else { mat2_transpose(&eps) };

    let mut visited = vec![false; n_nodes];
    let mut out_pairs = Vec::new();
    let nb = graph.n_boundary() * k;
    let mut boundary_node = vec![usize::MAX; nb];
    for (n, l) in link.iter().enumerate() {
        if let Link::Boundary(b) = l {
            boundary_node[*b] = n;
        }
    }
    for start in 0..nb {
        let n0 = boundary_node[start];
        if visited[n0] {
            continue;
        }
        let mut t = crate::tensorcore::pairing::mat2_identity();
        let mut cur = n0;
        loop {
            visited[cur] = true;
            let (m, first) = mate[cur];
            t = mat2_mul(&t, &pair_mat(first));
            visited[m] = true;
            match link[m] {
                Link::Boundary(b) => {
                    out_pairs.push(Pair { a: start, b, m: t });
                    break;
                }
                Link::Edge(next, e, fwd) => {
                    if let Some(g) = edge_mat(e, fwd) {
                        t = mat2_mul(&t, &g);
                    }
                    cur = next;
                }
            }
        }
    }
    let mut scalar = C64::new(1.0, 0.0);
    let mut loops = 0;
    for n0 in 0..n_nodes {
        if visited[n0] {
            continue;
        }
        let mut t = crate::tensorcore::pairing::mat2_identity();
        let mut cur = n0;
        loop {
            visited[cur] = true;
            let (m, first) = mate[cur];
            t = mat2_mul(&t, &pair_mat(first));
            visited[m] = true;
            let Link::Edge(next, e, fwd) = link[m] else {
                unreachable!("closed chains never reach the boundary")
            };
            if let Some(g) = edge_mat(e, fwd) {
                t = mat2_mul(&t, &g);
            }
            if next == n0 {
                break;
            }
            cur = next;
        }
        scalar *= t[0][0] + t[1][1];
        loops += 1;
    }
    let mut pairing = PairingState::new(nb, out_pairs, scalar)?;
    for e in graph.closed_edges() {
        pairing.perms.insert(e.id.to_string(), spec.b.clone());
    }
    Ok(NetworkState {
        graph: graph.clone(),
        spec: spec.clone(),
        pairing,
        holonomies: holonomies.cloned(),
        loops,
    })
}

/// Offset for edge-tensor leg ids in the dense network.
const EDGE_BASE: i64 = 1 << 30;

/// Leg id of position `pos` at vertex `v` in [`dense_network`].
pub fn vertex_leg_id(q: usize, v: usize, pos: usize) -> i64 {
    (v * q + pos) as i64
}

/// Leg ids of the edge tensor on closed edge `e`: (`ends.0` side, `ends.1` side).
pub fn edge_leg_ids(e: usize) -> (i64, i64) {
    (EDGE_BASE + 2 * e as i64, EDGE_BASE + 2 * e as i64 + 1)
}

/// Explicit tensor network of the patch: one vertex tensor per vertex and one
/// edge tensor per closed edge. Returns the network and the open leg ids in
/// boundary order.
pub fn dense_network(graph: &TilingGraph, spec: &HitSpec, holonomies: Option<&Holonomies>) -> Result<(Network, Vec<i64>)> {
    check_valence(graph, spec)?;
    let q = spec.q;
    let a = spec.vertex_tensor()?;
    let mut tensors = Vec::new();
    let mut plan = Vec::new();
    for v in 0..graph.n_vertices() {
        tensors.push(a.relabeled(vertex_leg_id(q, v, 0)));
    }
    for e in graph.closed_edges() {
        let (v, End::Vertex(w)) = e.ends else { unreachable!() };
        let (ia, ib) = edge_leg_ids(e.id);
        let g = holonomies.and_then(|h| h.get(&e.id));
        tensors.push(spec.edge_tensor(ia, ib, g)?);
        plan.push((vertex_leg_id(q, v, graph.slot_of(v, e.id).unwrap()), ia));
        plan.push((vertex_leg_id(q, w, graph.slot_of(w, e.id).unwrap()), ib));
    }
    let open = graph
        .boundary_legs
        .iter()
        .map(|&l| {
            let v = graph.edges[l].ends.0;
            vertex_leg_id(q, v, graph.slot_of(v, l).unwrap())
        })
        .collect();
    Ok((Network::new(tensors, plan), open))
}

/// Dense boundary state by explicit contraction (slot order as in the
/// pairing). Subject to the dense slot limit.
pub fn dense_boundary_state(graph: &TilingGraph, spec: &HitSpec, holonomies: Option<&Holonomies>) -> Result<DenseTensor> {
    let n = graph.n_boundary() * spec.k;
    if n > crate::tensorcore::pairing::DENSE_SLOT_LIMIT {
        return Err(HitError::SizeLimit {
            what: "dense boundary slots",
            needed: n,
            limit: crate::tensorcore::pairing::DENSE_SLOT_LIMIT,
        });
    }
    let (net, open) = dense_network(graph, spec, holonomies)?;
    net.contract(&open, crate::tensorcore::ContractOptions { factorize: true })
}

/// Entropy of a boundary region in bits.
pub fn boundary_entropy(state: &NetworkState, region: &BoundaryRegion) -> f64 {
    state.pairing.entropy(&state.region_slots(region))
}

#[derive(Clone, Debug, Serialize)]
pub struct RtPoint {
    pub start: usize,
    pub len: usize,
    pub entropy: f64,
    pub graph_length: usize,
    pub cut_edges: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RtFit {
    /// Least-squares slope of S against L through the origin (bits per edge).
    pub slope: f64,
    pub max_residual: f64,
    pub points: Vec<RtPoint>,
}

/// Entropy and min-cut length of every region.
pub fn rt_table(state: &NetworkState, regions: &[BoundaryRegion], exec: Exec) -> Result<Vec<RtPoint>> {
    let rows = par::map(exec, regions, |r| -> Result<RtPoint> {
        let c = minimal_cut(&state.graph, r)?;
        Ok(RtPoint {
            start: r.start,
            len: r.len,
            entropy: boundary_entropy(state, r),
            graph_length: c.cut.graph_length(),
            cut_edges: c.cut.edges.iter().copied().collect(),
        })
    });
    rows.into_iter().collect()
}

/// Fit S(A) = slope · L(γ_A) over the given regions.
pub fn rt_fit(state: &NetworkState, regions: &[BoundaryRegion]) -> Result<RtFit> {
    if regions.len() < 2 {
        return Err(HitError::DegenerateFit("need at least two regions".into()));
    }
    let points = rt_table(state, regions, Exec::default())?;
    let l0 = points[0].graph_length;
    if points.iter().all(|p| p.graph_length == l0) {
        return Err(HitError::DegenerateFit("all regions have the same cut length".into()));
    }
    let sxy: f64 = points.iter().map(|p| p.entropy * p.graph_length as f64).sum();
    let sxx: f64 = points.iter().map(|p| (p.graph_length as f64).powi(2)).sum();
    let slope = sxy / sxx;
    let max_residual = points
        .iter()
        .map(|p| (p.entropy - slope * p.graph_length as f64).abs())
        .fold(0.0, f64::max);
    Ok(RtFit {
        slope,
        max_residual,
        points,
    })
}

/// ⟨ψ|O₁O₂|ψ⟩/⟨ψ|ψ⟩ for operators on the boundary legs at positions `site1`
/// and `site2`. Equal sites multiply the operators (O₁ applied after O₂).
pub fn two_point_correlator(state: &NetworkState, obs1: &CMatrix, site1: usize, obs2: &CMatrix, site2: usize) -> Result<C64> {
    let k = state.spec.k;
    let n = state.graph.n_boundary();
    let d = 1usize << k;
    if site1 >= n || site2 >= n {
        return Err(HitError::Region(format!("site out of range 0..{n}")));
    }
    for o in [obs1, obs2] {
        if o.nrows() != d || o.ncols() != d {
            return Err(HitError::Dimension(format!("observable must be {d}x{d}")));
        }
    }
    let slots = |b: usize| (0..k).map(move |s| b * k + s);
    if site1 == site2 {
        let rho = state.pairing.reduced_density(&slots(site1).collect::<Vec<_>>())?;
        return Ok((rho * obs1 * obs2).trace());
    }
    // the reduced density sorts its slots, so order the operators to match
    let (lo, hi, o_lo, o_hi) = if site1 < site2 {
        (site1, site2, obs1, obs2)
    } else {
        (site2, site1, obs2, obs1)
    };
    let keep: Vec<usize> = slots(lo).chain(slots(hi)).collect();
    let rho = state.pairing.reduced_density(&keep)?;
    Ok((rho * o_lo.kronecker(o_hi)).trace())
}

/// Bookkeeping for correlations that decay with boundary distance.
#[derive(Clone, Debug, Serialize)]
pub struct KBudget {
    /// Slots per site needed when a site shares ⌊m e^{−j/ξ}⌋ pairs with the
    /// sites at distance j on both sides, j = 1..n/2.
    pub k: f64,
    /// The same count at the largest admissible m = e^{n/(2ξ)}.
    pub k_saturating: f64,
    pub m_max: f64,
    /// Largest distance with at least one shared pair, ⌊ξ ln m⌋.
    pub max_j: u64,
    /// The saturating budget grows at least linearly in n, so the valence
    /// must scale with the system size.
    pub linear_scaling: bool,
}

pub fn correlation_k_budget(n: u64, xi: f64, m: f64) -> Result<KBudget> {
    if !(xi > 0.0) {
        return Err(HitError::Spec(format!("correlation length must be positive, got {xi}")));
    }
    if n == 0 || !n.is_multiple_of(2) {
        return Err(HitError::Spec(format!("n must be even and positive, got {n}")));
    }
    if m < 1.0 {
        return Err(HitError::Spec(format!("m must be at least 1, got {m}")));
    }
    let half = n as f64 / 2.0;
    let denom = (1.0 / xi).exp_m1();
    let k = 2.0 * m * (-(-half / xi).exp_m1()) / denom;
    let k_saturating = 2.0 * (half / xi).exp_m1() / denom;
    Ok(KBudget {
        k,
        k_saturating,
        m_max: (half / xi).exp(),
        max_j: (xi * m.ln()).floor() as u64,
        linear_scaling: k_saturating >= n as f64 - 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hit::{make_left_right, make_star};
    use crate::tensorcore::linalg::bipartite_entropy_slots;
    use crate::tiling::build_tiling;

    fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)])
    }

    #[test]
    fn bare_vertex_has_three_pairs() {
        let g = build_tiling(7, 3, 0).unwrap();
        let st = assemble(&g, &make_left_right(3).unwrap()).unwrap();
        assert_eq!(st.pairing.pairs().len(), 3);
        assert_eq!(st.n_boundary_slots(), 6);
        assert_eq!(st.loops, 0);
    }

    #[test]
    fn chain_assembly_matches_dense_on_small_patch() {
        // (5,4) layer 0 with star k=1, and a two-layer check on left/right q=4
        let g = build_tiling(5, 4, 0).unwrap();
        for spec in [make_star(4, 1).unwrap(), make_left_right(4).unwrap()] {
            let st = assemble(&g, &spec).unwrap();
            let p = st.pairing.to_dense(26).unwrap();
            let d = dense_boundary_state(&g, &spec, None).unwrap();
            for (x, y) in p.data().iter().zip(d.data()) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn entropy_of_trivial_regions() {
        let g = build_tiling(7, 3, 1).unwrap();
        let st = assemble(&g, &make_left_right(3).unwrap()).unwrap();
        let n = g.n_boundary();
        assert_eq!(boundary_entropy(&st, &BoundaryRegion::new(&g, 0, 0).unwrap()), 0.0);
        assert_eq!(boundary_entropy(&st, &BoundaryRegion::new(&g, 0, n).unwrap()), 0.0);
    }

    #[test]
    fn purity_and_cut_bound() {
        let g = build_tiling(7, 3, 2).unwrap();
        let st = assemble(&g, &make_left_right(3).unwrap()).unwrap();
        for r in BoundaryRegion::all_contiguous(&g) {
            let s = boundary_entropy(&st, &r);
            assert_eq!(s, boundary_entropy(&st, &r.complement()));
            let l = minimal_cut(&g, &r).unwrap().cut.graph_length();
            assert!(s <= (2 * l) as f64);
        }
    }

    #[test]
    fn rt_fit_needs_two_distinct_lengths() {
        let g = build_tiling(7, 3, 1).unwrap();
        let st = assemble(&g, &make_left_right(3).unwrap()).unwrap();
        let r = BoundaryRegion::new(&g, 0, 1).unwrap();
        assert!(rt_fit(&st, &[r]).is_err());
        assert!(rt_fit(&st, &[r, BoundaryRegion::new(&g, 1, 1).unwrap()]).is_err());
    }

    #[test]
    fn singlet_correlator_is_fully_correlated() {
        // a single star vertex pairs opposite legs
        let g = build_tiling(5, 4, 0).unwrap();
        let st = assemble(&g, &make_star(4, 1).unwrap()).unwrap();
        let z = pauli_z();
        let shared = (0..4).find(|&b| st.pairing.partner(0) == Some(b)).unwrap();
        let c = two_point_correlator(&st, &z, 0, &z, shared).unwrap();
        assert!((c - C64::new(-1.0, 0.0)).norm() < 1e-12);
        let other = (1..4).find(|&b| b != shared).unwrap();
        let c = two_point_correlator(&st, &z, 0, &z, other).unwrap();
        assert!(c.norm() < 1e-12);
        assert!(two_point_correlator(&st, &z, 0, &z, 9).is_err());
    }

    #[test]
    fn holonomies_do_not_change_entropy() {
        let g = build_tiling(5, 4, 1).unwrap();
        let spec = make_star(4, 1).unwrap();
        let h = random_holonomies(&g, 11);
        let a = assemble(&g, &spec).unwrap();
        let b = assemble_with(&g, &spec, Some(&h)).unwrap();
        for r in BoundaryRegion::all_contiguous(&g) {
            assert!((boundary_entropy(&a, &r) - boundary_entropy(&b, &r)).abs() < 1e-12);
        }
        assert!((a.pairing.norm_sqr() - b.pairing.norm_sqr()).abs() < 1e-9 * a.pairing.norm_sqr());
    }

    #[test]
    fn dressed_chain_matches_dense() {
        // (5,4) layer 1 with k=1 has 20 boundary slots
        let g = build_tiling(5, 4, 1).unwrap();
        let spec = make_star(4, 1).unwrap();
        let h = random_holonomies(&g, 5);
        let st = assemble_with(&g, &spec, Some(&h)).unwrap();
        let p = st.pairing.to_dense(26).unwrap();
        let d = dense_boundary_state(&g, &spec, Some(&h)).unwrap();
        let n = p.n_slots();
        for (x, y) in p.data().iter().zip(d.data()) {
            assert!((x - y).norm() < 1e-10);
        }
        let half: Vec<usize> = (0..n / 2).collect();
        let s = bipartite_entropy_slots(d.data(), n, &half).unwrap();
        assert!((s - st.pairing.entropy(&half)).abs() < 1e-9);
    }

    #[test]
    fn k_budget_closed_forms() {
        let b = correlation_k_budget(8, 2.0, 3.0).unwrap();
        let direct: f64 = (1..=4).map(|j| 6.0 * (-(j as f64) / 2.0).exp()).sum();
        assert!((b.k - direct).abs() < 1e-12);
        assert_eq!(b.max_j, (2.0 * 3f64.ln()).floor() as u64);
        let big = correlation_k_budget(8, 1e9, 3.0).unwrap();
        assert!((big.k - 24.0).abs() < 1e-6);
        assert!(b.linear_scaling);
        assert!(correlation_k_budget(8, 0.0, 3.0).is_err());
        assert!(correlation_k_budget(7, 1.0, 3.0).is_err());
    }
}
