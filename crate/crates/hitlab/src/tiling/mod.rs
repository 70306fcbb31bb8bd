//! Finite patches of hyperbolic (p,q) tilings.
//!
//! Patches are vertex-centered: layer 0 is a single q-valent vertex and each
//! further layer adds every p-gon touching the previous layer. Vertex
//! positions live in the Poincaré disk and are used to discover the
//! combinatorics and for drawing; everything else works on the combinatorial
//! graph.

mod build;
mod cut;
mod svg;

pub use build::build_tiling;
pub use cut::{greedy_wedge, minimal_cut, BoundaryRegion, Cut, CutResult, IsometryRuleSet, WedgeResult};
pub use svg::to_svg;

use crate::{HitError, Result, C64};
use serde::{Deserialize, Serialize};

/// Second endpoint of an edge: a vertex or the disk boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Vertex(usize),
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: usize,
    pub ends: (usize, End),
}

impl Edge {
    pub fn is_leg(&self) -> bool {
        self.ends.1 == End::Boundary
    }

    /// The endpoint opposite to `v` (None for the boundary side).
    pub fn other(&self, v: usize) -> Option<usize> {
        match self.ends {
            (a, End::Vertex(b)) if a == v => Some(b),
            (a, End::Vertex(b)) if b == v => Some(a),
            _ => None,
        }
    }
}

impl Serialize for Edge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum E<'a> {
            V(usize),
            B(&'a str),
        }
        #[derive(Serialize)]
        struct J<'a> {
            id: usize,
            ends: [E<'a>; 2],
        }
        let second = match self.ends.1 {
            End::Vertex(w) => E::V(w),
            End::Boundary => E::B("boundary"),
        };
        J {
            id: self.id,
            ends: [E::V(self.ends.0), second],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum E {
            V(usize),
            B(String),
        }
        #[derive(Deserialize)]
        struct J {
            id: usize,
            ends: (usize, E),
        }
        let j = J::deserialize(d)?;
        let second = match j.ends.1 {
            E::V(w) => End::Vertex(w),
            E::B(s) if s == "boundary" => End::Boundary,
            E::B(s) => return Err(serde::de::Error::custom(format!("unknown end marker {s}"))),
        };
        Ok(Edge {
            id: j.id,
            ends: (j.ends.0, second),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub layer: usize,
    /// Incident edge ids in counterclockwise order.
    pub edges: Vec<usize>,
}

/// Combinatorial tiling patch with counterclockwise boundary legs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TilingGraph {
    pub p: usize,
    pub q: usize,
    pub layers: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    #[serde(rename = "boundary")]
    pub boundary_legs: Vec<usize>,
    /// Poincaré-disk positions (drawing only).
    #[serde(skip)]
    pub positions: Option<Vec<C64>>,
    /// Outer tip of every boundary leg, by edge id (drawing only).
    #[serde(skip)]
    pub leg_tips: Option<Vec<(usize, C64)>>,
}

impl PartialEq for TilingGraph {
    fn eq(&self, o: &Self) -> bool {
        self.p == o.p
            && self.q == o.q
            && self.layers == o.layers
            && self.vertices == o.vertices
            && self.edges == o.edges
            && self.boundary_legs == o.boundary_legs
    }
}

pub fn check_hyperbolic(p: usize, q: usize) -> Result<()> {
    if p < 3 || q < 3 || (p - 2) * (q - 2) <= 4 {
        return Err(HitError::NotHyperbolic { p, q });
    }
    Ok(())
}

impl TilingGraph {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary_legs.len()
    }

    /// Edges with two vertex endpoints.
    pub fn closed_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| !e.is_leg())
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// Position of edge `e` in the ccw order at vertex `v`.
    pub fn slot_of(&self, v: usize, e: usize) -> Option<usize> {
        self.vertices[v].edges.iter().position(|&x| x == e)
    }

    /// Index of a leg within the boundary order.
    pub fn boundary_index(&self, leg: usize) -> Option<usize> {
        self.boundary_legs.iter().position(|&x| x == leg)
    }

    /// Check structural invariants: degrees, edge consistency, boundary walk.
    pub fn validate(&self) -> Result<()> {
        check_hyperbolic(self.p, self.q)?;
        let bad = |m: String| Err(HitError::Spec(m));
        for (i, e) in self.edges.iter().enumerate() {
            if e.id != i {
                return bad(format!("edge {i} has id {}", e.id));
            }
            let ends: Vec<usize> = match e.ends {
                (a, End::Vertex(b)) => vec![a, b],
                (a, End::Boundary) => vec![a],
            };
            for v in ends {
                if v >= self.vertices.len() || !self.vertices[v].edges.contains(&i) {
                    return bad(format!("edge {i} not listed at vertex {v}"));
                }
            }
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id != i {
                return bad(format!("vertex {i} has id {}", v.id));
            }
            if v.edges.len() != self.q {
                return bad(format!("vertex {i} has {} edges", v.edges.len()));
            }
        }
        let legs: Vec<usize> = self.edges.iter().filter(|e| e.is_leg()).map(|e| e.id).collect();
        let mut sorted = self.boundary_legs.clone();
        sorted.sort_unstable();
        if sorted != legs {
            return bad("boundary list does not match the legs".into());
        }
        if self.boundary_legs.len() > 1 {
            let walked = boundary_walk(self, self.boundary_legs[0])?;
            if walked != self.boundary_legs {
                return bad("boundary legs are not in walk order".into());
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<TilingGraph> {
        let g: TilingGraph = serde_json::from_str(s)?;
        g.validate()?;
        Ok(g)
    }

    /// Re-attach drawing positions by rebuilding the same patch, if the
    /// combinatorics agree.
    pub fn with_positions(mut self) -> TilingGraph {
        if self.positions.is_none() {
            if let Ok(b) = build_tiling(self.p, self.q, self.layers) {
                if b == self {
                    self.positions = b.positions;
                    self.leg_tips = b.leg_tips;
                }
            }
        }
        self
    }
}

/// Walk the outer boundary counterclockwise starting at `leg`, returning the
/// legs in the order met. At each vertex the walk leaves along the
/// counterclockwise successor of the edge it arrived on.
pub(crate) fn boundary_walk(g: &TilingGraph, leg: usize) -> Result<Vec<usize>> {
    let total = g.edges.iter().filter(|e| e.is_leg()).count();
    let mut out = vec![leg];
    let mut arrive_edge = leg;
    let mut at = g.edges[leg].ends.0;
    let limit = 4 * g.edges.len() + 4;
    for _ in 0..limit {
        let inc = &g.vertices[at].edges;
        let pos = inc.iter().position(|&e| e == arrive_edge).unwrap();
        let next = inc[(pos + 1) % inc.len()];
        let e = &g.edges[next];
        if e.is_leg() {
            if next == leg {
                break;
            }
            out.push(next);
            arrive_edge = next;
        } else {
            at = e.other(at).unwrap();
            arrive_edge = next;
        }
    }
    if out.len() != total {
        return Err(HitError::Spec(format!(
            "boundary walk visited {} of {} legs",
            out.len(),
            total
        )));
    }
    Ok(out)
}
