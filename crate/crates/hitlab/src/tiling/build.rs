use super::{boundary_walk, check_hyperbolic, Edge, End, TilingGraph, Vertex};
use crate::{Result, C64};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Möbius map sending `a` to the origin.
fn to_origin(a: C64, z: C64) -> C64 {
    (z - a) / (C64::new(1.0, 0.0) - a.conj() * z)
}

/// Inverse of [`to_origin`].
fn from_origin(a: C64, w: C64) -> C64 {
    (w + a) / (C64::new(1.0, 0.0) + a.conj() * w)
}

/// cosh of the hyperbolic distance minus one, up to a factor 2.
fn hyp_sep(a: C64, b: C64) -> f64 {
    (a - b).norm_sqr() / ((1.0 - a.norm_sqr()) * (1.0 - b.norm_sqr()))
}

struct Geometry {
    p: usize,
    q: usize,
    /// Poincaré radius of a neighbor seen from a vertex at the origin.
    r_edge: f64,
    /// Poincaré radius of a face center seen from one of its vertices.
    r_face: f64,
}

impl Geometry {
    fn new(p: usize, q: usize) -> Self {
        let (pp, qq) = (PI / p as f64, PI / q as f64);
        let half_edge = (pp.cos() / qq.sin()).acosh();
        let circum = (1.0 / (pp.tan() * qq.tan())).acosh();
        Geometry {
            p,
            q,
            r_edge: half_edge.tanh(),
            r_face: (circum / 2.0).tanh(),
        }
    }
}

struct Builder {
    geo: Geometry,
    pos: Vec<C64>,
    layer: Vec<usize>,
    /// a neighbor used to fix the local frame at each vertex
    reference: Vec<Option<C64>>,
    faces: Vec<(C64, Vec<usize>)>,
}

impl Builder {
    fn find_vertex(&self, z: C64) -> Option<usize> {
        self.pos.iter().position(|&w| hyp_sep(w, z) < 1e-8)
    }

    fn add_vertex(&mut self, z: C64, layer: usize) -> usize {
        if let Some(i) = self.find_vertex(z) {
            return i;
        }
        self.pos.push(z);
        self.layer.push(layer);
        self.reference.push(None);
        self.pos.len() - 1
    }

    /// Local frame angle at `v`: the direction of its reference neighbor.
    fn frame(&self, v: usize) -> f64 {
        match self.reference[v] {
            Some(u) => to_origin(self.pos[v], u).arg(),
            None => 0.0,
        }
    }

    fn add_faces_around(&mut self, v: usize, layer: usize) {
        let (p, q) = (self.geo.p, self.geo.q);
        let z = self.pos[v];
        let th = self.frame(v);
        for m in 0..q {
            let ang = th + 2.0 * PI * (m as f64 + 0.5) / q as f64;
            let center = from_origin(z, C64::from_polar(self.geo.r_face, ang));
            if self.faces.iter().any(|(c, _)| hyp_sep(*c, center) < 1e-8) {
                continue;
            }
            // vertices of the face: rotate v about the center
            let local = to_origin(center, z);
            let mut ids = Vec::with_capacity(p);
            for t in 0..p {
                let w = local * C64::from_polar(1.0, 2.0 * PI * t as f64 / p as f64);
                let zz = from_origin(center, w);
                ids.push(self.add_vertex(zz, layer));
            }
            for t in 0..p {
                let a = ids[t];
                let b = ids[(t + 1) % p];
                if self.reference[a].is_none() {
                    self.reference[a] = Some(self.pos[b]);
                }
            }
            self.faces.push((center, ids));
        }
    }
}

/// Build the vertex-centered patch with `layers` layers.
pub fn build_tiling(p: usize, q: usize, layers: usize) -> Result<TilingGraph> {
    check_hyperbolic(p, q)?;
    let mut b = Builder {
        geo: Geometry::new(p, q),
        pos: vec![C64::new(0.0, 0.0)],
        layer: vec![0],
        reference: vec![None],
        faces: Vec::new(),
    };
    for l in 1..=layers {
        let frontier: Vec<usize> = (0..b.pos.len()).filter(|&v| b.layer[v] == l - 1).collect();
        for v in frontier {
            b.add_faces_around(v, l);
        }
    }
    // deterministic vertex order: by layer, then angle, then radius
    let n = b.pos.len();
    let mut order: Vec<usize> = (0..n).collect();
    let key = |v: usize| {
        let a = b.pos[v].arg().rem_euclid(2.0 * PI);
        let a = if b.pos[v].norm() < 1e-12 { 0.0 } else { a };
        ((a * 1e9).round() as i64, (b.pos[v].norm() * 1e9).round() as i64)
    };
    order.sort_by_key(|&v| (b.layer[v], key(v)));
    let mut new_id = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        new_id[v] = i;
    }
    let pos: Vec<C64> = order.iter().map(|&v| b.pos[v]).collect();
    let layer: Vec<usize> = order.iter().map(|&v| b.layer[v]).collect();

    // closed edges from face boundaries
    let mut pairs: BTreeMap<(usize, usize), ()> = BTreeMap::new();
    for (_, ids) in &b.faces {
        for t in 0..ids.len() {
            let (x, y) = (new_id[ids[t]], new_id[ids[(t + 1) % ids.len()]]);
            pairs.insert((x.min(y), x.max(y)), ());
        }
    }
    let mut edges: Vec<Edge> = pairs
        .keys()
        .enumerate()
        .map(|(i, &(x, y))| Edge {
            id: i,
            ends: (x, End::Vertex(y)),
        })
        .collect();

    // local directions at each vertex: (angle, edge id or pending leg tip)
    let geo = Geometry::new(p, q);
    let mut incident: Vec<Vec<(f64, Option<usize>, C64)>> = vec![Vec::new(); n];
    for e in &edges {
        if let (x, End::Vertex(y)) = e.ends {
            incident[x].push((to_origin(pos[x], pos[y]).arg(), Some(e.id), pos[y]));
            incident[y].push((to_origin(pos[y], pos[x]).arg(), Some(e.id), pos[x]));
        }
    }
    for v in 0..n {
        let base = if let Some(&(a, _, _)) = incident[v].first() { a } else { 0.0 };
        let step = 2.0 * PI / q as f64;
        let mut used = vec![false; q];
        for &(a, _, _) in &incident[v] {
            let m = (((a - base) / step).round() as i64).rem_euclid(q as i64) as usize;
            used[m] = true;
        }
        for (m, u) in used.iter().enumerate() {
            if !u {
                let a = base + step * m as f64;
                let tip = from_origin(pos[v], C64::from_polar(geo.r_edge, a));
                incident[v].push((a, None, tip));
            }
        }
        // ccw order, starting from the direction pointing back to the center
        let toward_center = if v == 0 { 0.0 } else { to_origin(pos[v], C64::new(0.0, 0.0)).arg() };
        incident[v].sort_by(|x, y| {
            let ax = (x.0 - toward_center).rem_euclid(2.0 * PI);
            let ay = (y.0 - toward_center).rem_euclid(2.0 * PI);
            let ax = if ax > 2.0 * PI - 1e-9 { 0.0 } else { ax };
            let ay = if ay > 2.0 * PI - 1e-9 { 0.0 } else { ay };
            ax.partial_cmp(&ay).unwrap()
        });
    }
    // legs get ids after the closed edges, in vertex order
    let mut tips = Vec::new();
    let mut vertices = Vec::with_capacity(n);
    for (v, inc) in incident.iter().enumerate() {
        let mut ids = Vec::with_capacity(q);
        for &(_, e, tip) in inc {
            match e {
                Some(id) => ids.push(id),
                None => {
                    let id = edges.len();
                    edges.push(Edge {
                        id,
                        ends: (v, End::Boundary),
                    });
                    tips.push((id, tip));
                    ids.push(id);
                }
            }
        }
        vertices.push(Vertex {
            id: v,
            layer: layer[v],
            edges: ids,
        });
    }
    let mut g = TilingGraph {
        p,
        q,
        layers,
        vertices,
        edges,
        boundary_legs: Vec::new(),
        positions: Some(pos),
        leg_tips: None,
    };
    // boundary order: start at the leg whose tip has the smallest angle
    let start = tips
        .iter()
        .min_by(|a, b| {
            let x = a.1.arg().rem_euclid(2.0 * PI);
            let y = b.1.arg().rem_euclid(2.0 * PI);
            x.partial_cmp(&y).unwrap()
        })
        .map(|t| t.0)
        .expect("every patch has legs");
    g.boundary_legs = boundary_walk(&g, start)?;
    g.leg_tips = Some(tips);
    g.validate()?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex_patch() {
        let g = build_tiling(7, 3, 0).unwrap();
        assert_eq!(g.n_vertices(), 1);
        assert_eq!(g.n_boundary(), 3);
        assert_eq!(g.closed_edges().count(), 0);
    }

    #[test]
    fn one_layer_heptagons() {
        let g = build_tiling(7, 3, 1).unwrap();
        assert_eq!(g.n_vertices(), 16);
        assert_eq!(g.closed_edges().count(), 18);
        assert_eq!(g.n_boundary(), 12);
    }

    #[test]
    fn rejects_flat_and_spherical() {
        for (p, q) in [(6, 3), (4, 4), (3, 6), (5, 3), (2, 7), (7, 2)] {
            assert!(build_tiling(p, q, 1).is_err(), "({p},{q})");
        }
    }

    #[test]
    fn json_roundtrip() {
        let g = build_tiling(5, 4, 1).unwrap();
        let s = g.to_json().unwrap();
        assert!(s.contains("\"boundary\""));
        let back = TilingGraph::from_json(&s).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn ids_are_deterministic() {
        let a = build_tiling(7, 3, 2).unwrap();
        let b = build_tiling(7, 3, 2).unwrap();
        assert_eq!(a, b);
    }
}
