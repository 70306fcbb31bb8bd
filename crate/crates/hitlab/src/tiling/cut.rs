use super::{End, TilingGraph};
use crate::{HitError, Result};
use std::collections::{BTreeSet, VecDeque};

/// A contiguous arc of boundary legs, `len` legs starting at boundary index
/// `start` (counterclockwise). Lengths 0 and n are allowed for entropy
/// bookkeeping; cuts require a proper arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryRegion {
    pub start: usize,
    pub len: usize,
    pub total: usize,
}

impl BoundaryRegion {
    pub fn new(g: &TilingGraph, start: usize, len: usize) -> Result<Self> {
        let total = g.n_boundary();
        if start >= total || len > total {
            return Err(HitError::Region(format!("start {start}, len {len} on {total} legs")));
        }
        Ok(BoundaryRegion { start, len, total })
    }

    pub fn is_proper(&self) -> bool {
        self.len > 0 && self.len < self.total
    }

    /// Boundary indices covered, in order.
    pub fn indices(&self) -> Vec<usize> {
        (0..self.len).map(|i| (self.start + i) % self.total).collect()
    }

    /// Edge ids of the covered legs.
    pub fn legs(&self, g: &TilingGraph) -> Vec<usize> {
        self.indices().iter().map(|&i| g.boundary_legs[i]).collect()
    }

    pub fn complement(&self) -> BoundaryRegion {
        BoundaryRegion {
            start: (self.start + self.len) % self.total,
            len: self.total - self.len,
            total: self.total,
        }
    }

    /// Every proper contiguous region.
    pub fn all_contiguous(g: &TilingGraph) -> Vec<BoundaryRegion> {
        let n = g.n_boundary();
        let mut out = Vec::new();
        for len in 1..n {
            for start in 0..n {
                out.push(BoundaryRegion { start, len, total: n });
            }
        }
        out
    }
}

/// A set of edges separating a region's legs from the complement legs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub edges: BTreeSet<usize>,
    /// Boundary gaps at the two ends of the region: gap `i` sits just before
    /// boundary index `i`.
    pub endpoints: (usize, usize),
}

impl Cut {
    /// Graph length: number of crossed edges.
    pub fn graph_length(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Clone, Debug)]
pub struct CutResult {
    pub cut: Cut,
    /// Vertices on the region side (the entanglement wedge).
    pub wedge: BTreeSet<usize>,
}

/// Unit-capacity flow network on vertices plus source and sink.
struct FlowNet {
    n: usize,
    /// (to, capacity, reverse index)
    adj: Vec<Vec<(usize, i32, usize)>>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        FlowNet { n, adj: vec![Vec::new(); n] }
    }

    fn add_undirected(&mut self, a: usize, b: usize) {
        let ia = self.adj[a].len();
        let ib = self.adj[b].len();
        self.adj[a].push((b, 1, ib));
        self.adj[b].push((a, 1, ia));
    }

    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut flow = 0;
        loop {
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.n];
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; self.n];
            seen[s] = true;
            while let Some(x) = queue.pop_front() {
                for (i, &(y, cap, _)) in self.adj[x].iter().enumerate() {
                    if cap > 0 && !seen[y] {
                        seen[y] = true;
                        prev[y] = Some((x, i));
                        queue.push_back(y);
                    }
                }
            }
            if !seen[t] {
                return flow;
            }
            let mut y = t;
            while let Some((x, i)) = prev[y] {
                let (_, _, r) = self.adj[x][i];
                self.adj[x][i].1 -= 1;
                self.adj[y][r].1 += 1;
                y = x;
            }
            flow += 1;
        }
    }

    /// Nodes that can still push flow into `t` in the residual graph.
    fn can_reach(&self, t: usize) -> Vec<bool> {
        let mut ok = vec![false; self.n];
        ok[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(y) = queue.pop_front() {
            // residual arc x -> y exists when the reverse entry at y has
            // capacity on x's side
            for &(x, _, r) in &self.adj[y] {
                if !ok[x] && self.adj[x][r].1 > 0 {
                    ok[x] = true;
                    queue.push_back(x);
                }
            }
        }
        ok
    }
}

/// Minimum edge cut between `region` legs and the complement legs. Among all
/// minimum cuts the one with the largest region-side vertex set is returned.
pub fn minimal_cut(g: &TilingGraph, region: &BoundaryRegion) -> Result<CutResult> {
    if !region.is_proper() {
        return Err(HitError::Region("minimal cut needs a proper region".into()));
    }
    let nv = g.n_vertices();
    let (s, t) = (nv, nv + 1);
    let mut net = FlowNet::new(nv + 2);
    let in_region: BTreeSet<usize> = region.legs(g).into_iter().collect();
    for e in &g.edges {
        match e.ends {
            (a, End::Vertex(b)) => net.add_undirected(a, b),
            (a, End::Boundary) => {
                if in_region.contains(&e.id) {
                    net.add_undirected(s, a)
                } else {
                    net.add_undirected(a, t)
                }
            }
        }
    }
    let value = net.max_flow(s, t);
    let reach_t = net.can_reach(t);
    let wedge: BTreeSet<usize> = (0..nv).filter(|&v| !reach_t[v]).collect();
    let side = |x: Option<usize>, leg_in_region: bool| -> bool {
        match x {
            Some(v) => wedge.contains(&v),
            None => leg_in_region,
        }
    };
    let mut edges = BTreeSet::new();
    for e in &g.edges {
        let (a, b) = match e.ends {
            (a, End::Vertex(b)) => (side(Some(a), false), side(Some(b), false)),
            (a, End::Boundary) => (side(Some(a), false), side(None, in_region.contains(&e.id))),
        };
        if a != b {
            edges.insert(e.id);
        }
    }
    debug_assert_eq!(edges.len(), value);
    Ok(CutResult {
        cut: Cut {
            edges,
            endpoints: (region.start, (region.start + region.len) % region.total),
        },
        wedge,
    })
}

/// Local moves licensed by the isometry relations of the vertex and edge
/// tensors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsometryRuleSet {
    /// A vertex with all legs but one on the curve is absorbed.
    pub single: bool,
    /// Edge tensors are unitary, so the curve may pass through them. Without
    /// this no vertex can be absorbed.
    pub unitary_b: bool,
    /// Two adjacent vertices with all legs but the two outer ones next to
    /// their shared edge on the curve are absorbed together.
    pub pair: bool,
}

impl Default for IsometryRuleSet {
    fn default() -> Self {
        IsometryRuleSet {
            single: true,
            unitary_b: true,
            pair: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct WedgeResult {
    pub wedge: BTreeSet<usize>,
    pub strip: BTreeSet<usize>,
}

/// Greedy fixed point of the licensed moves, starting from the legs in
/// `seed`. Returns the absorbed vertex set.
fn greedy_from(g: &TilingGraph, seed: &BTreeSet<usize>, rules: IsometryRuleSet) -> BTreeSet<usize> {
    let nv = g.n_vertices();
    let mut absorbed = vec![false; nv];
    if !rules.unitary_b || seed.is_empty() {
        return BTreeSet::new();
    }
    // is edge e (incident to unabsorbed v) on the curve?
    let on_curve = |absorbed: &[bool], v: usize, e: usize| -> bool {
        match g.edges[e].other(v) {
            Some(w) => absorbed[w],
            None => seed.contains(&e),
        }
    };
    loop {
        let mut changed = false;
        if rules.single {
            for v in 0..nv {
                if absorbed[v] {
                    continue;
                }
                let n_on = g.vertices[v].edges.iter().filter(|&&e| on_curve(&absorbed, v, e)).count();
                if n_on + 1 >= g.q {
                    absorbed[v] = true;
                    changed = true;
                }
            }
        }
        if !changed && rules.pair {
            'outer: for e in g.closed_edges() {
                let (v, w) = match e.ends {
                    (a, End::Vertex(b)) => (a, b),
                    _ => unreachable!(),
                };
                if absorbed[v] || absorbed[w] {
                    continue;
                }
                let ev = &g.vertices[v].edges;
                let ew = &g.vertices[w].edges;
                let pv = ev.iter().position(|&x| x == e.id).unwrap();
                let pw = ew.iter().position(|&x| x == e.id).unwrap();
                let q = g.q;
                // (outer leg at v, outer leg at w) on the same side of e
                let sides = [
                    (ev[(pv + 1) % q], ew[(pw + q - 1) % q]),
                    (ev[(pv + q - 1) % q], ew[(pw + 1) % q]),
                ];
                for (ov, ow) in sides {
                    let rest_v = ev.iter().filter(|&&x| x != e.id && x != ov).all(|&x| on_curve(&absorbed, v, x));
                    let rest_w = ew.iter().filter(|&&x| x != e.id && x != ow).all(|&x| on_curve(&absorbed, w, x));
                    if rest_v && rest_w {
                        absorbed[v] = true;
                        absorbed[w] = true;
                        changed = true;
                        break 'outer;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    (0..nv).filter(|&v| absorbed[v]).collect()
}

/// Greedy wedge of `region` and the strip left between it and the greedy
/// wedge of the complement.
pub fn greedy_wedge(g: &TilingGraph, region: &BoundaryRegion, rules: IsometryRuleSet) -> WedgeResult {
    let seed: BTreeSet<usize> = region.legs(g).into_iter().collect();
    let cseed: BTreeSet<usize> = region.complement().legs(g).into_iter().collect();
    let wedge = greedy_from(g, &seed, rules);
    let other = greedy_from(g, &cseed, rules);
    let strip = (0..g.n_vertices())
        .filter(|v| !wedge.contains(v) && !other.contains(v))
        .collect();
    WedgeResult { wedge, strip }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::build_tiling;

    #[test]
    fn single_leg_region() {
        let g = build_tiling(7, 3, 1).unwrap();
        for start in 0..g.n_boundary() {
            let r = BoundaryRegion::new(&g, start, 1).unwrap();
            let c = minimal_cut(&g, &r).unwrap();
            assert_eq!(c.cut.edges.iter().copied().collect::<Vec<_>>(), vec![g.boundary_legs[start]]);
            assert!(c.wedge.is_empty());
            assert_eq!(c.cut.graph_length(), 1);
        }
    }

    #[test]
    fn empty_region_greedy() {
        let g = build_tiling(7, 3, 1).unwrap();
        let r = BoundaryRegion::new(&g, 0, 0).unwrap();
        let w = greedy_wedge(&g, &r, IsometryRuleSet::default());
        assert!(w.wedge.is_empty());
        let full = greedy_from(&g, &r.complement().legs(&g).into_iter().collect(), IsometryRuleSet::default());
        assert_eq!(w.strip.len(), g.n_vertices() - full.len());
        assert!(minimal_cut(&g, &r).is_err());
    }

    #[test]
    fn cut_is_symmetric_under_complement() {
        let g = build_tiling(5, 4, 1).unwrap();
        for r in BoundaryRegion::all_contiguous(&g) {
            let a = minimal_cut(&g, &r).unwrap().cut.graph_length();
            let b = minimal_cut(&g, &r.complement()).unwrap().cut.graph_length();
            assert_eq!(a, b);
            assert!(a <= r.len);
        }
    }
}
