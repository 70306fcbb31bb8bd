use super::{Cut, End, TilingGraph};
use std::fmt::Write;

const SIZE: f64 = 600.0;

fn px(z: crate::C64) -> (f64, f64) {
    let r = SIZE / 2.0 - 10.0;
    (SIZE / 2.0 + r * z.re, SIZE / 2.0 - r * z.im)
}

/// Poincaré-disk drawing of the patch. Edges are straight chords; edges in
/// `cut` are highlighted. Positions are recomputed when the graph was loaded
/// from JSON.
pub fn to_svg(graph: &TilingGraph, cut: Option<&Cut>) -> String {
    let g = graph.clone().with_positions();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let c = SIZE / 2.0;
    let _ = writeln!(
        s,
        r##"<circle cx="{c}" cy="{c}" r="{}" fill="none" stroke="#888"/>"##,
        SIZE / 2.0 - 10.0
    );
    let (Some(pos), Some(tips)) = (g.positions.as_ref(), g.leg_tips.as_ref()) else {
        s.push_str("</svg>\n");
        return s;
    };
    let tip_of = |id: usize| tips.iter().find(|t| t.0 == id).map(|t| t.1);
    for e in &g.edges {
        let a = pos[e.ends.0];
        let b = match e.ends.1 {
            End::Vertex(w) => pos[w],
            End::Boundary => match tip_of(e.id) {
                Some(t) => t,
                None => continue,
            },
        };
        let hot = cut.is_some_and(|c| c.edges.contains(&e.id));
        let (x1, y1) = px(a);
        let (x2, y2) = px(b);
        let (col, w) = if hot { ("#d62728", 3.0) } else { ("#1f77b4", 1.0) };
        let _ = writeln!(
            s,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{col}" stroke-width="{w}"/>"#
        );
    }
    for z in pos {
        let (x, y) = px(*z);
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="2.5" fill="black"/>"#);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::{build_tiling, minimal_cut, BoundaryRegion};

    #[test]
    fn svg_has_all_edges() {
        let g = build_tiling(7, 3, 1).unwrap();
        let r = BoundaryRegion::new(&g, 0, 4).unwrap();
        let c = minimal_cut(&g, &r).unwrap();
        let svg = to_svg(&g, Some(&c.cut));
        assert_eq!(svg.matches("<line").count(), g.edges.len());
        assert_eq!(svg.matches("#d62728").count(), c.cut.graph_length());
        let back = TilingGraph::from_json(&g.to_json().unwrap()).unwrap();
        assert_eq!(to_svg(&back, None).matches("<line").count(), g.edges.len());
    }
}
