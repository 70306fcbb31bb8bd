//! Tiling patches and cuts against independently computed references.

use hitlab::tiling::{build_tiling, greedy_wedge, minimal_cut, BoundaryRegion, End, IsometryRuleSet, TilingGraph};
use num_complex::Complex64 as C;
use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::PI;

// ---------- independent patch enumeration by Möbius rotations ----------

/// Rotation of the Poincaré disk by `theta` about the point `c`.
fn rotate_about(z: C, c: C, theta: f64) -> C {
    let to0 = (z - c) / (C::new(1.0, 0.0) - c.conj() * z);
    let r = to0 * C::from_polar(1.0, theta);
    (r + c) / (C::new(1.0, 0.0) + c.conj() * r)
}

fn same_point(a: C, b: C) -> bool {
    let d = 2.0 * (a - b).norm_sqr() / ((1.0 - a.norm_sqr()) * (1.0 - b.norm_sqr()));
    d < 1e-8
}

fn find_or_add(points: &mut Vec<C>, z: C) -> (usize, bool) {
    if let Some(i) = points.iter().position(|&p| same_point(p, z)) {
        return (i, false);
    }
    points.push(z);
    (points.len() - 1, true)
}

struct Counts {
    vertices: usize,
    closed_edges: usize,
    legs: usize,
    per_layer: Vec<usize>,
}

/// Grows the patch polygon by polygon from the central vertex, using only
/// hyperbolic rotations about tile centers and vertices.
fn reference_counts(p: usize, q: usize, layers: usize) -> Counts {
    let (a, b) = (PI / p as f64, PI / q as f64);
    // distance from a vertex to the center of an incident tile
    let r = (1.0 / (a.tan() * b.tan())).acosh();
    let c0 = C::new((r / 2.0).tanh(), 0.0);

    let mut verts = vec![C::new(0.0, 0.0)];
    let mut layer_of = vec![0usize];
    // a tile centre known to contain each vertex
    let mut home = vec![c0];
    let mut tiles: Vec<C> = Vec::new();
    let mut tile_corner: Vec<usize> = Vec::new();
    let mut frontier = vec![0usize];
    for layer in 1..=layers {
        let mut next = Vec::new();
        for &v in &frontier {
            for s in 0..q {
                let centre = rotate_about(home[v], verts[v], 2.0 * PI * s as f64 / q as f64);
                let (_, new_tile) = find_or_add(&mut tiles, centre);
                if !new_tile {
                    continue;
                }
                tile_corner.push(v);
                for t in 0..p {
                    let corner = rotate_about(verts[v], centre, 2.0 * PI * t as f64 / p as f64);
                    let (i, fresh) = find_or_add(&mut verts, corner);
                    if fresh {
                        layer_of.push(layer);
                        home.push(centre);
                        next.push(i);
                    }
                }
            }
        }
        frontier = next;
    }

    // edges join consecutive corners of a tile
    let mut edges = BTreeSet::new();
    for (&centre, &v0) in tiles.iter().zip(&tile_corner) {
        let corners: Vec<Option<usize>> = (0..p)
            .map(|t| {
                let z = rotate_about(verts[v0], centre, 2.0 * PI * t as f64 / p as f64);
                verts.iter().position(|&v| same_point(v, z))
            })
            .collect();
        for t in 0..p {
            if let (Some(x), Some(y)) = (corners[t], corners[(t + 1) % p]) {
                edges.insert((x.min(y), x.max(y)));
            }
        }
    }
    let mut per_layer = vec![0; layers + 1];
    for &l in &layer_of {
        per_layer[l] += 1;
    }
    Counts {
        vertices: verts.len(),
        closed_edges: edges.len(),
        legs: q * verts.len() - 2 * edges.len(),
        per_layer,
    }
}

#[test]
fn patch_counts_match_rotation_enumeration() {
    for (p, q, max_l) in [(7, 3, 3), (5, 4, 2), (4, 5, 2), (4, 6, 2), (3, 7, 2), (8, 3, 2)] {
        for l in 0..=max_l {
            let g = build_tiling(p, q, l).unwrap();
            let want = reference_counts(p, q, l);
            let mut per_layer = vec![0; l + 1];
            for v in &g.vertices {
                per_layer[v.layer] += 1;
            }
            assert_eq!(g.n_vertices(), want.vertices, "({p},{q},{l}) vertices");
            assert_eq!(g.closed_edges().count(), want.closed_edges, "({p},{q},{l}) edges");
            assert_eq!(g.n_boundary(), want.legs, "({p},{q},{l}) legs");
            assert_eq!(per_layer, want.per_layer, "({p},{q},{l}) layer sizes");
        }
    }
}

#[test]
fn every_vertex_has_valence_q_and_legs_are_dangling() {
    for (p, q, l) in [(7, 3, 2), (5, 4, 2), (4, 6, 1)] {
        let g = build_tiling(p, q, l).unwrap();
        g.validate().unwrap();
        for v in &g.vertices {
            assert_eq!(v.edges.len(), q);
        }
        let legs: BTreeSet<usize> = g.edges.iter().filter(|e| e.is_leg()).map(|e| e.id).collect();
        let listed: BTreeSet<usize> = g.boundary_legs.iter().copied().collect();
        assert_eq!(legs, listed);
        assert_eq!(listed.len(), g.boundary_legs.len());
    }
}

// ---------- independent cut oracles ----------

/// Node 0..nv are vertices, nv is the region terminal, nv+1 the complement
/// terminal. Returns (edge id, endpoint, endpoint) for every edge.
fn terminal_graph(g: &TilingGraph, region: &BoundaryRegion) -> Vec<(usize, usize, usize)> {
    let nv = g.n_vertices();
    let inside: BTreeSet<usize> = region.legs(g).into_iter().collect();
    g.edges
        .iter()
        .map(|e| match e.ends {
            (a, End::Vertex(b)) => (e.id, a, b),
            (a, End::Boundary) => (e.id, a, if inside.contains(&e.id) { nv } else { nv + 1 }),
        })
        .collect()
}

/// Nodes reachable from the region terminal when `removed` edges are gone.
fn reach(n: usize, edges: &[(usize, usize, usize)], removed: &BTreeSet<usize>, src: usize) -> Vec<bool> {
    let mut adj = vec![Vec::new(); n];
    for &(id, a, b) in edges {
        if !removed.contains(&id) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; n];
    seen[src] = true;
    let mut stack = vec![src];
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Smallest separating edge subset of size at most `max`, by enumerating
/// subsets in increasing size. Returns the size and the largest region-side
/// vertex set among the minimisers.
fn exhaustive_cut(g: &TilingGraph, region: &BoundaryRegion, max: usize) -> Option<(usize, BTreeSet<usize>)> {
    fn walk(
        from: usize,
        left: usize,
        chosen: &mut Vec<usize>,
        ids: &[usize],
        visit: &mut dyn FnMut(&BTreeSet<usize>),
    ) {
        if left == 0 {
            visit(&chosen.iter().copied().collect());
            return;
        }
        for i in from..ids.len() {
            chosen.push(ids[i]);
            walk(i + 1, left - 1, chosen, ids, visit);
            chosen.pop();
        }
    }
    let nv = g.n_vertices();
    let edges = terminal_graph(g, region);
    let ids: Vec<usize> = edges.iter().map(|e| e.0).collect();
    for size in 0..=max {
        let mut best: Option<BTreeSet<usize>> = None;
        walk(0, size, &mut Vec::new(), &ids, &mut |removed| {
            let seen = reach(nv + 2, &edges, removed, nv);
            if !seen[nv + 1] {
                let side: BTreeSet<usize> = (0..nv).filter(|&v| seen[v]).collect();
                if best.as_ref().is_none_or(|b| side.len() > b.len()) {
                    best = Some(side);
                }
            }
        });
        if let Some(side) = best {
            return Some((size, side));
        }
    }
    None
}

/// Maximum number of edge-disjoint terminal-to-terminal paths, by repeated
/// depth-first augmentation on a residual capacity matrix.
fn max_flow_dfs(g: &TilingGraph, region: &BoundaryRegion) -> usize {
    let nv = g.n_vertices();
    let n = nv + 2;
    let mut cap = vec![vec![0i32; n]; n];
    for (_, a, b) in terminal_graph(g, region) {
        cap[a][b] += 1;
        cap[b][a] += 1;
    }
    fn augment(x: usize, t: usize, cap: &mut [Vec<i32>], seen: &mut [bool]) -> bool {
        if x == t {
            return true;
        }
        seen[x] = true;
        for y in 0..cap.len() {
            if cap[x][y] > 0 && !seen[y] && augment(y, t, cap, seen) {
                cap[x][y] -= 1;
                cap[y][x] += 1;
                return true;
            }
        }
        false
    }
    let mut flow = 0;
    loop {
        let mut seen = vec![false; n];
        if !augment(nv, nv + 1, &mut cap, &mut seen) {
            return flow;
        }
        flow += 1;
    }
}

#[test]
fn min_cut_matches_exhaustive_subsets_on_one_layer() {
    let g = build_tiling(7, 3, 1).unwrap();
    for region in BoundaryRegion::all_contiguous(&g) {
        let got = minimal_cut(&g, &region).unwrap();
        match exhaustive_cut(&g, &region, 4) {
            Some((size, side)) => {
                assert_eq!(got.cut.graph_length(), size, "{region:?}");
                assert_eq!(got.wedge, side, "{region:?}");
            }
            None => assert!(got.cut.graph_length() > 4, "{region:?}"),
        }
    }
}

#[test]
fn all_but_one_leg_region() {
    let g = build_tiling(7, 3, 1).unwrap();
    let n = g.n_boundary();
    for start in 0..n {
        let region = BoundaryRegion::new(&g, start, n - 1).unwrap();
        let got = minimal_cut(&g, &region).unwrap();
        assert_eq!(got.cut.graph_length(), 1);
        let excluded = g.boundary_legs[(start + n - 1) % n];
        assert_eq!(got.cut.edges, BTreeSet::from([excluded]));
    }
}

#[test]
fn min_cut_matches_independent_max_flow() {
    for (p, q, l) in [(7, 3, 2), (5, 4, 2), (4, 5, 2)] {
        let g = build_tiling(p, q, l).unwrap();
        let n = g.n_boundary();
        let half = BoundaryRegion::new(&g, 0, n / 2).unwrap();
        assert_eq!(minimal_cut(&g, &half).unwrap().cut.graph_length(), max_flow_dfs(&g, &half));
        for region in BoundaryRegion::all_contiguous(&g).into_iter().step_by(7) {
            let got = minimal_cut(&g, &region).unwrap();
            assert_eq!(got.cut.graph_length(), max_flow_dfs(&g, &region), "({p},{q},{l}) {region:?}");
        }
    }
}

#[test]
fn returned_cut_separates_and_bounds_its_wedge() {
    let g = build_tiling(5, 4, 2).unwrap();
    let nv = g.n_vertices();
    for region in BoundaryRegion::all_contiguous(&g).into_iter().step_by(5) {
        let res = minimal_cut(&g, &region).unwrap();
        let edges = terminal_graph(&g, &region);
        let seen = reach(nv + 2, &edges, &res.cut.edges, nv);
        assert!(!seen[nv + 1]);
        let side: BTreeSet<usize> = (0..nv).filter(|&v| seen[v]).collect();
        assert_eq!(side, res.wedge);
    }
}

#[test]
fn cut_size_bounded_and_complement_symmetric() {
    for (p, q, l) in [(7, 3, 2), (5, 4, 2)] {
        let g = build_tiling(p, q, l).unwrap();
        for region in BoundaryRegion::all_contiguous(&g) {
            let a = minimal_cut(&g, &region).unwrap().cut.graph_length();
            let b = minimal_cut(&g, &region.complement()).unwrap().cut.graph_length();
            assert_eq!(a, b);
            assert!(a <= region.len.min(region.total - region.len));
        }
    }
}

#[test]
fn rotation_maps_cuts_to_cuts_of_equal_size() {
    for (p, q, l) in [(7, 3, 2), (5, 4, 2), (4, 6, 1)] {
        let g = build_tiling(p, q, l).unwrap();
        let n = g.n_boundary();
        assert_eq!(n % q, 0);
        let step = n / q;
        for region in BoundaryRegion::all_contiguous(&g) {
            let turned = BoundaryRegion::new(&g, (region.start + step) % n, region.len).unwrap();
            let a = minimal_cut(&g, &region).unwrap();
            let b = minimal_cut(&g, &turned).unwrap();
            assert_eq!(a.cut.graph_length(), b.cut.graph_length());
            assert_eq!(a.wedge.len(), b.wedge.len());
        }
    }
}

#[test]
fn wedge_grows_with_region() {
    for (p, q, l) in [(7, 3, 2), (5, 4, 2)] {
        let g = build_tiling(p, q, l).unwrap();
        let n = g.n_boundary();
        for start in 0..n {
            let mut last = 0;
            for len in 1..n {
                let w = minimal_cut(&g, &BoundaryRegion::new(&g, start, len).unwrap()).unwrap().wedge.len();
                assert!(w >= last, "({p},{q},{l}) start {start} len {len}");
                last = w;
            }
        }
    }
}

#[test]
fn seven_three_greedy_wedge_equals_min_cut_wedge() {
    for l in 0..=2 {
        let g = build_tiling(7, 3, l).unwrap();
        for region in BoundaryRegion::all_contiguous(&g) {
            let greedy = greedy_wedge(&g, &region, IsometryRuleSet::default());
            let cut = minimal_cut(&g, &region).unwrap();
            assert_eq!(greedy.wedge, cut.wedge, "layer {l} {region:?}");
            assert!(greedy.strip.is_empty(), "layer {l} {region:?}");
        }
    }
}

/// The region's greedy wedge together with the strip: every vertex the
/// complement's greedy pass cannot claim for itself alone. Pair moves are
/// unitary, so both passes may absorb the same pair.
fn causal_cone(g: &TilingGraph, region: &BoundaryRegion) -> BTreeSet<usize> {
    let w = greedy_wedge(g, region, IsometryRuleSet::default());
    w.wedge.union(&w.strip).copied().collect()
}

#[test]
fn greedy_wedge_within_min_cut_wedge_within_causal_cone() {
    for (p, q, l) in [(5, 4, 2), (4, 5, 1), (7, 3, 2)] {
        let g = build_tiling(p, q, l).unwrap();
        for region in BoundaryRegion::all_contiguous(&g) {
            let greedy = greedy_wedge(&g, &region, IsometryRuleSet::default()).wedge;
            let cut = minimal_cut(&g, &region).unwrap().wedge;
            assert!(greedy.is_subset(&cut), "({p},{q},{l}) {region:?}");
            assert!(cut.is_subset(&causal_cone(&g, &region)), "({p},{q},{l}) {region:?}");
        }
    }
}

#[test]
fn five_four_has_a_region_with_a_strip() {
    let g = build_tiling(5, 4, 1).unwrap();
    let witness = BoundaryRegion::all_contiguous(&g).into_iter().find(|r| {
        let strip = greedy_wedge(&g, r, IsometryRuleSet::default()).strip;
        let cut = minimal_cut(&g, r).unwrap().wedge;
        let cone = causal_cone(&g, r);
        !strip.is_empty() && cut.len() < cone.len()
    });
    assert!(witness.is_some());
}

#[test]
fn no_absorption_without_unitary_edges() {
    let rules = IsometryRuleSet {
        single: true,
        unitary_b: false,
        pair: true,
    };
    let g = build_tiling(5, 4, 1).unwrap();
    for region in BoundaryRegion::all_contiguous(&g) {
        assert!(greedy_wedge(&g, &region, rules).wedge.is_empty());
    }
}

#[test]
fn empty_and_single_leg_regions() {
    let g = build_tiling(5, 4, 1).unwrap();
    let empty = BoundaryRegion::new(&g, 0, 0).unwrap();
    let w = greedy_wedge(&g, &empty, IsometryRuleSet::default());
    assert!(w.wedge.is_empty());
    let other = greedy_wedge(&g, &empty.complement(), IsometryRuleSet::default()).wedge;
    let rest: BTreeSet<usize> = (0..g.n_vertices()).filter(|v| !other.contains(v)).collect();
    assert_eq!(w.strip, rest);

    for start in 0..g.n_boundary() {
        let r = BoundaryRegion::new(&g, start, 1).unwrap();
        let res = minimal_cut(&g, &r).unwrap();
        assert_eq!(res.cut.edges, BTreeSet::from([g.boundary_legs[start]]));
        assert!(res.wedge.is_empty());
    }
}

#[test]
fn graph_length_is_additive_over_disjoint_cuts() {
    let g = build_tiling(7, 3, 2).unwrap();
    let a = minimal_cut(&g, &BoundaryRegion::new(&g, 0, 3).unwrap()).unwrap().cut;
    let b = minimal_cut(&g, &BoundaryRegion::new(&g, 15, 3).unwrap()).unwrap().cut;
    assert!(a.edges.is_disjoint(&b.edges));
    let union: BTreeSet<usize> = a.edges.union(&b.edges).copied().collect();
    assert_eq!(union.len(), a.graph_length() + b.graph_length());
}

#[test]
fn breadth_first_layers_agree_with_graph_distance() {
    // a vertex of layer L is at least L steps from the centre in the graph
    let g = build_tiling(7, 3, 3).unwrap();
    let mut dist = vec![usize::MAX; g.n_vertices()];
    dist[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &e in &g.vertices[v].edges {
            if let Some(w) = g.edges[e].other(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    for v in &g.vertices {
        assert!(dist[v.id] >= v.layer);
        assert!(dist[v.id] != usize::MAX);
    }
}
