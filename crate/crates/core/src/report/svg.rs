use std::fmt::Write;

use crate::arrangement::Arrangement;
use crate::coloring::{Coloring, Growth};
use crate::geom::Geodesic;

/// Ten well-separated hues; color `k` (1-based) uses entry `k - 1`, cycling.
pub const DEFAULT_PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

const GRAY: &str = "#444444";

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    /// Width and height in pixels.
    pub size: u32,
    /// Fraction of the half-size left blank around the disk.
    pub margin: f64,
    pub stroke_width: f64,
    /// Shade the tiles of each growth polygon, later generations lighter.
    pub growth_overlay: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            size: 800,
            margin: 0.02,
            stroke_width: 1.2,
            growth_overlay: true,
        }
    }
}

struct Frame {
    center: f64,
    scale: f64,
}

impl Frame {
    fn screen(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.center + self.scale * p[0],
            self.center - self.scale * p[1],
        ]
    }
}

/// Circle orthogonal to the unit circle through the endpoints, as a screen
/// center and radius; `None` for (near) diameters.
fn orthogonal_circle(line: &Geodesic, f: &Frame) -> Option<([f64; 2], f64)> {
    let (e1, e2) = line.circle_endpoints();
    let dot = e1[0] * e2[0] + e1[1] * e2[1];
    if 1.0 + dot < 1e-9 {
        return None;
    }
    let c = [(e1[0] + e2[0]) / (1.0 + dot), (e1[1] + e2[1]) / (1.0 + dot)];
    let r = (c[0] * c[0] + c[1] * c[1] - 1.0).max(0.0).sqrt();
    if r > 1e6 {
        return None;
    }
    Some((f.screen(c), r * f.scale))
}

/// Path command from `a` to `b` (screen points) along the line's circle.
fn arc_to(out: &mut String, a: [f64; 2], b: [f64; 2], circle: Option<([f64; 2], f64)>) {
    match circle {
        None => {
            let _ = write!(out, " L {:.3} {:.3}", b[0], b[1]);
        }
        Some((c, r)) => {
            // the wanted minor arc turns clockwise on screen iff the center
            // lies to the right of a -> b
            let d = [b[0] - a[0], b[1] - a[1]];
            let sweep = u8::from(d[0] * (c[1] - a[1]) - d[1] * (c[0] - a[0]) > 0.0);
            let _ = write!(out, " A {r:.3} {r:.3} 0 0 {sweep} {:.3} {:.3}", b[0], b[1]);
        }
    }
}

fn tile_path(a: &Arrangement, tile: usize, f: &Frame) -> Option<String> {
    let t = &a.faces[tile];
    if t.has_arc {
        return None;
    }
    let pts: Vec<[f64; 2]> = t
        .vertices
        .iter()
        .map(|&v| f.screen(a.vertices[v].location.disk()))
        .collect();
    let mut d = format!("M {:.3} {:.3}", pts[0][0], pts[0][1]);
    for (k, &h) in t.half_edges.iter().enumerate() {
        let line = a.line_of(h)?;
        let circle = orthogonal_circle(&a.family.lines[line], f);
        arc_to(&mut d, pts[k], pts[(k + 1) % pts.len()], circle);
    }
    d.push_str(" Z");
    Some(d)
}

/// SVG 1.1 drawing of the arrangement in the Poincaré disk: one stroked
/// `path.line` per family line, colored by `coloring` when given.
pub fn render_svg(
    a: &Arrangement,
    coloring: Option<&Coloring>,
    growth: Option<&Growth>,
    spec: &RenderSpec,
) -> String {
    let half = spec.size as f64 / 2.0;
    let f = Frame {
        center: half,
        scale: half * (1.0 - spec.margin),
    };
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        spec.size
    );
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="disk"><circle cx="{0:.3}" cy="{0:.3}" r="{1:.3}"/></clipPath></defs>"#,
        f.center, f.scale
    );
    let _ = writeln!(
        out,
        r#"<circle class="boundary" cx="{0:.3}" cy="{0:.3}" r="{1:.3}" fill="white" stroke="black" stroke-width="1"/>"#,
        f.center, f.scale
    );
    let _ = writeln!(out, r#"<g clip-path="url(#disk)">"#);

    if let (Some(g), true) = (growth, spec.growth_overlay) {
        let n = g.states.len().max(1) as f64;
        let mut seen = std::collections::HashSet::new();
        for (gen, state) in g.states.iter().enumerate() {
            let opacity = 0.45 * (1.0 - gen as f64 / (n + 1.0));
            for &t in &state.tiles {
                if !seen.insert(t) {
                    continue;
                }
                if let Some(d) = tile_path(a, t, &f) {
                    let _ = writeln!(
                        out,
                        r##"<path class="tile" data-generation="{gen}" d="{d}" fill="#f2c14e" fill-opacity="{opacity:.3}" stroke="none"/>"##
                    );
                }
            }
        }
    }

    for (i, line) in a.family.lines.iter().enumerate() {
        let (e1, e2) = line.circle_endpoints();
        let (p, q) = (f.screen(e1), f.screen(e2));
        let mut d = format!("M {:.3} {:.3}", p[0], p[1]);
        arc_to(&mut d, p, q, orthogonal_circle(line, &f));
        let stroke = match coloring {
            Some(c) => DEFAULT_PALETTE[(c.colors[i].max(1) as usize - 1) % DEFAULT_PALETTE.len()],
            None => GRAY,
        };
        let _ = writeln!(
            out,
            r#"<path class="line" data-line="{i}" d="{d}" fill="none" stroke="{stroke}" stroke-width="{:.2}"/>"#,
            spec.stroke_width
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn palette_is_distinct() {
        let set: HashSet<_> = DEFAULT_PALETTE.iter().collect();
        assert_eq!(set.len(), DEFAULT_PALETTE.len());
        assert!(set.len() >= 7);
    }

    #[test]
    fn diameter_is_straight() {
        let f = Frame {
            center: 100.0,
            scale: 98.0,
        };
        let g = Geodesic::from_reals(-1.0, 1.0).unwrap();
        assert!(orthogonal_circle(&g, &f).is_none());
        let g = Geodesic::from_reals(0.5, 3.0).unwrap();
        let (_, r) = orthogonal_circle(&g, &f).unwrap();
        assert!(r > 0.0);
    }
}
