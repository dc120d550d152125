//! Line families of axis translates and the planar subdivision they cut
//! out of a disk about the basepoint.
//!
//! The subdivision is a half-edge structure. Combinatorics (rotation order at
//! vertices, turns along faces) are read off in Klein coordinates, where
//! geodesics are straight chords; metric quantities use the hyperboloid.

mod checks;
mod family;
mod graph;
mod grid;

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checks::{
    adjacency_observations, expected_census, local_degree_and_clique_checks, tile_census,
    verify_crossing_axioms, AdjacencyReport, CrossingAxioms, ExpectedCensus, LocalChecks,
};
pub use family::{
    build_line_family, FamilyConfig, LineFamily, DEFAULT_MAX_WORD_LEN, DEFAULT_RADIUS,
};
pub use graph::{check_k_plane, IntersectionGraph, KPlaneResult};

use crate::geom::{
    corner_angle, geodesics_intersect, hyperbolic_distance, mink, Geodesic, GeomError, Point,
    EPS_PT,
};
use crate::trigroup::GroupError;
use grid::PointGrid;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArrangementError {
    #[error("line family is empty")]
    EmptyFamily,
    #[error("region radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("the line is not the axis of the Scott element of this group")]
    NotScottAxis,
    #[error("three lines {lines:?} meet within {distance:.3e} of one point")]
    TriplePointDetected { lines: [usize; 3], distance: f64 },
    #[error("no complete tiles in the trusted sub-disk")]
    NoCompleteTiles,
    #[error("face extraction failed: {0}")]
    Topology(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexKind {
    /// A point of the crossing set: exactly two lines meet here.
    Crossing { lines: (usize, usize) },
    /// Where a line leaves the clipped disk.
    Clip { line: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrVertex {
    pub location: Point,
    pub klein: [f64; 2],
    pub kind: VertexKind,
}

impl ArrVertex {
    pub fn is_crossing(&self) -> bool {
        matches!(self.kind, VertexKind::Crossing { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    Segment {
        line: usize,
    },
    /// Piece of the clipping circle.
    Arc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub kind: EdgeKind,
}

/// A face of the subdivision, traversed counterclockwise (interior on the
/// left) in the model's orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tile {
    pub vertices: Vec<usize>,
    pub half_edges: Vec<usize>,
    pub side_count: usize,
    pub has_arc: bool,
    /// No clipped boundary and every vertex inside the trusted sub-disk.
    pub complete: bool,
    pub outer: bool,
}

/// A crossing of two family lines, wherever it lies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub lines: (usize, usize),
    pub point: Point,
    /// Vertex id when the crossing lies inside the clipped disk.
    pub vertex: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Arrangement {
    pub family: LineFamily,
    pub trusted_radius: f64,
    pub vertices: Vec<ArrVertex>,
    pub edges: Vec<Edge>,
    /// Half-edge `2e` runs `a -> b` along edge `e`, `2e + 1` runs back.
    he_next: Vec<usize>,
    he_face: Vec<usize>,
    pub faces: Vec<Tile>,
    pub outer_face: usize,
    /// Faces around each vertex, in counterclockwise order.
    pub vertex_faces: Vec<Vec<usize>>,
    /// Vertex ids along each line, ordered from its first to second endpoint.
    pub line_vertices: Vec<Vec<usize>>,
    pub crossings: Vec<Crossing>,
    pub graph: IntersectionGraph,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ArrangementConfig {
    /// Radius of the disk whose faces count as tiles. Defaults to the whole
    /// region when the family is known to hold every line meeting it (then a
    /// face with no clipped side cannot be cut by a missing line), and to
    /// half the region otherwise.
    pub trusted_radius: Option<f64>,
}

/// Frame of a line: foot of the perpendicular from the basepoint and the
/// unit tangent there, pointing toward the second endpoint.
struct LineFrame {
    foot: [f64; 3],
    tangent: [f64; 3],
    /// Klein direction of the chord, first to second endpoint.
    chord: [f64; 2],
    /// Arclength from the foot to the clip circle.
    half_length: f64,
}

impl LineFrame {
    fn new(l: &Geodesic, radius: f64) -> LineFrame {
        let foot_pt = l.point_at(0.0);
        let ahead = l.point_at(1.0);
        let foot = foot_pt.hyperboloid();
        let a = ahead.hyperboloid();
        // ahead = cosh(1) foot + sinh(1) tangent
        let c = 1f64.cosh();
        let s = 1f64.sinh();
        let tangent = [
            (a[0] - c * foot[0]) / s,
            (a[1] - c * foot[1]) / s,
            (a[2] - c * foot[2]) / s,
        ];
        let (e1, e2) = l.circle_endpoints();
        let chord = [e2[0] - e1[0], e2[1] - e1[1]];
        let n = chord[0].hypot(chord[1]);
        let d = hyperbolic_distance(&Point::BASE, &foot_pt);
        // right triangle: cosh R = cosh d cosh s
        let half_length = (radius.cosh() / d.cosh()).max(1.0).acosh();
        LineFrame {
            foot,
            tangent,
            chord: [chord[0] / n, chord[1] / n],
            half_length,
        }
    }

    fn param(&self, p: &Point) -> f64 {
        mink(&p.hyperboloid(), &self.tangent).asinh()
    }

    fn point(&self, s: f64) -> Point {
        let (c, sh) = (s.cosh(), s.sinh());
        Point::from_hyperboloid([
            c * self.foot[0] + sh * self.tangent[0],
            c * self.foot[1] + sh * self.tangent[1],
            c * self.foot[2] + sh * self.tangent[2],
        ])
    }
}

pub fn build_arrangement(family: LineFamily) -> Result<Arrangement, ArrangementError> {
    build_arrangement_with(family, &ArrangementConfig::default())
}

pub fn build_arrangement_with(
    mut family: LineFamily,
    config: &ArrangementConfig,
) -> Result<Arrangement, ArrangementError> {
    if family.is_empty() {
        return Err(ArrangementError::EmptyFamily);
    }
    family::drop_near_tangent_pairs(&mut family);
    let radius = family.region_radius;
    let trusted_radius = config.trusted_radius.unwrap_or(if family.exhaustive {
        radius
    } else {
        radius / 2.0
    });
    let lines = &family.lines;
    let n = lines.len();
    let frames: Vec<LineFrame> = lines.iter().map(|l| LineFrame::new(l, radius)).collect();
    let mut warnings = Vec::new();

    // all pairwise crossings
    let found: Vec<(usize, usize, Point)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let lines = &lines;
            (i + 1..n).filter_map(move |j| {
                geodesics_intersect(&lines[i], &lines[j])
                    .ok()
                    .flatten()
                    .map(|p| (i, j, p))
            })
        })
        .collect();
    let graph = IntersectionGraph::from_edges(n, found.iter().map(|&(i, j, _)| (i, j)));

    let mut vertices: Vec<ArrVertex> = Vec::new();
    let mut crossings = Vec::with_capacity(found.len());
    // (param, vertex) per line
    let mut on_line: Vec<Vec<(f64, usize)>> = vec![Vec::new(); n];
    for &(i, j, p) in &found {
        let d = hyperbolic_distance(&Point::BASE, &p);
        let (si, sj) = (frames[i].param(&p), frames[j].param(&p));
        // decided along the lines themselves, so the order against the clip
        // vertices is consistent
        let inside = si.abs() < frames[i].half_length && sj.abs() < frames[j].half_length;
        if (d - radius).abs() < EPS_PT {
            warnings.push(format!(
                "crossing of lines {i} and {j} lies on the clip circle"
            ));
        }
        let vertex = if inside {
            let id = vertices.len();
            vertices.push(ArrVertex {
                location: p,
                klein: p.klein(),
                kind: VertexKind::Crossing { lines: (i, j) },
            });
            on_line[i].push((si, id));
            on_line[j].push((sj, id));
            Some(id)
        } else {
            None
        };
        crossings.push(Crossing {
            lines: (i, j),
            point: p,
            vertex,
        });
    }

    // triple points show up as coincident consecutive crossings on a line
    for (li, list) in on_line.iter_mut().enumerate() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in list.windows(2) {
            let (va, vb) = (&vertices[w[0].1], &vertices[w[1].1]);
            let dist = hyperbolic_distance(&va.location, &vb.location);
            if dist <= EPS_PT {
                let other = |v: &ArrVertex| match v.kind {
                    VertexKind::Crossing { lines: (a, b) } => {
                        if a == li {
                            b
                        } else {
                            a
                        }
                    }
                    VertexKind::Clip { line } => line,
                };
                let mut trio = [li, other(va), other(vb)];
                trio.sort_unstable();
                return Err(ArrangementError::TriplePointDetected {
                    lines: trio,
                    distance: dist,
                });
            }
        }
    }

    // clip vertices and line segments
    let mut edges: Vec<Edge> = Vec::new();
    let mut clip_ids = Vec::with_capacity(2 * n);
    let mut line_vertices = Vec::with_capacity(n);
    for (li, frame) in frames.iter().enumerate() {
        let s = frame.half_length;
        let mut ids = Vec::with_capacity(on_line[li].len() + 2);
        for (k, param) in [(0, -s), (1, s)] {
            let p = frame.point(param);
            let id = vertices.len();
            vertices.push(ArrVertex {
                location: p,
                klein: p.klein(),
                kind: VertexKind::Clip { line: li },
            });
            clip_ids.push(id);
            if k == 0 {
                ids.push(id);
            }
        }
        ids.extend(on_line[li].iter().map(|&(_, v)| v));
        ids.push(clip_ids[clip_ids.len() - 1]);
        for w in ids.windows(2) {
            edges.push(Edge {
                a: w[0],
                b: w[1],
                kind: EdgeKind::Segment { line: li },
            });
        }
        line_vertices.push(ids);
    }
    // arcs of the clip circle, counterclockwise
    let mut around: Vec<(f64, usize)> = clip_ids
        .iter()
        .map(|&id| {
            let k = vertices[id].klein;
            (k[1].atan2(k[0]).rem_euclid(TAU), id)
        })
        .collect();
    around.sort_by(|a, b| a.0.total_cmp(&b.0));
    for k in 0..around.len() {
        let (a0, a) = around[k];
        let (b0, b) = around[(k + 1) % around.len()];
        if (b0 - a0).rem_euclid(TAU) < 1e-13 {
            warnings.push(format!("clip vertices {a} and {b} coincide on the circle"));
        }
        edges.push(Edge {
            a,
            b,
            kind: EdgeKind::Arc,
        });
    }

    // rotation system
    let nv = vertices.len();
    let mut outgoing: Vec<Vec<(f64, usize)>> = vec![Vec::new(); nv];
    for (e, edge) in edges.iter().enumerate() {
        for (h, from, forward) in [(2 * e, edge.a, true), (2 * e + 1, edge.b, false)] {
            let dir = match edge.kind {
                EdgeKind::Segment { line } => {
                    let c = frames[line].chord;
                    if forward {
                        c
                    } else {
                        [-c[0], -c[1]]
                    }
                }
                EdgeKind::Arc => {
                    let k = vertices[from].klein;
                    if forward {
                        [-k[1], k[0]]
                    } else {
                        [k[1], -k[0]]
                    }
                }
            };
            outgoing[from].push((dir[1].atan2(dir[0]), h));
        }
    }
    for list in outgoing.iter_mut() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let nh = 2 * edges.len();
    let origin = |h: usize| {
        if h.is_multiple_of(2) {
            edges[h / 2].a
        } else {
            edges[h / 2].b
        }
    };
    let mut position = vec![0usize; nh];
    for list in &outgoing {
        for (k, &(_, h)) in list.iter().enumerate() {
            position[h] = k;
        }
    }
    let mut he_next = vec![usize::MAX; nh];
    for h in 0..nh {
        let twin = h ^ 1;
        let v = origin(twin);
        let list = &outgoing[v];
        let k = position[twin];
        he_next[h] = list[(k + list.len() - 1) % list.len()].1;
    }

    // faces
    let mut he_face = vec![usize::MAX; nh];
    let mut faces = Vec::new();
    let mut outer_face = usize::MAX;
    for start in 0..nh {
        if he_face[start] != usize::MAX {
            continue;
        }
        let fid = faces.len();
        let mut hs = Vec::new();
        let mut h = start;
        loop {
            if he_face[h] != usize::MAX {
                return Err(ArrangementError::Topology(format!(
                    "half-edge {h} reached twice"
                )));
            }
            he_face[h] = fid;
            hs.push(h);
            h = he_next[h];
            if h == start {
                break;
            }
            if hs.len() > nh {
                return Err(ArrangementError::Topology("unterminated face".into()));
            }
        }
        let verts: Vec<usize> = hs.iter().map(|&h| origin(h)).collect();
        let has_arc = hs.iter().any(|&h| edges[h / 2].kind == EdgeKind::Arc);
        let outer = hs
            .iter()
            .all(|&h| edges[h / 2].kind == EdgeKind::Arc && h % 2 == 1);
        if outer {
            if outer_face != usize::MAX {
                return Err(ArrangementError::Topology("two outer faces".into()));
            }
            outer_face = fid;
        }
        let complete = !has_arc
            && verts.iter().all(|&v| {
                hyperbolic_distance(&Point::BASE, &vertices[v].location) <= trusted_radius
            });
        faces.push(Tile {
            side_count: hs.len(),
            vertices: verts,
            half_edges: hs,
            has_arc,
            complete,
            outer,
        });
    }
    if outer_face == usize::MAX {
        return Err(ArrangementError::Topology("no outer face".into()));
    }

    let vertex_faces = outgoing
        .iter()
        .map(|list| list.iter().map(|&(_, h)| he_face[h]).collect())
        .collect();

    warnings.extend(family.warnings.iter().cloned());
    Ok(Arrangement {
        family,
        trusted_radius,
        vertices,
        edges,
        he_next,
        he_face,
        faces,
        outer_face,
        vertex_faces,
        line_vertices,
        crossings,
        graph,
        warnings,
    })
}

impl Arrangement {
    pub fn origin(&self, h: usize) -> usize {
        let e = &self.edges[h / 2];
        if h.is_multiple_of(2) {
            e.a
        } else {
            e.b
        }
    }

    pub fn dest(&self, h: usize) -> usize {
        self.origin(h ^ 1)
    }

    pub fn next(&self, h: usize) -> usize {
        self.he_next[h]
    }

    pub fn face_of(&self, h: usize) -> usize {
        self.he_face[h]
    }

    /// Line carrying half-edge `h`, if it is a segment.
    pub fn line_of(&self, h: usize) -> Option<usize> {
        match self.edges[h / 2].kind {
            EdgeKind::Segment { line } => Some(line),
            EdgeKind::Arc => None,
        }
    }

    pub fn num_half_edges(&self) -> usize {
        self.he_next.len()
    }

    /// Inner faces (tiles), with their ids.
    pub fn tiles(&self) -> impl Iterator<Item = (usize, &Tile)> {
        self.faces.iter().enumerate().filter(|(_, t)| !t.outer)
    }

    pub fn complete_tiles(&self) -> impl Iterator<Item = (usize, &Tile)> {
        self.tiles().filter(|(_, t)| t.complete)
    }

    /// Lines carrying the edges of face `f`, sorted.
    pub fn tile_lines(&self, f: usize) -> Vec<usize> {
        let mut ls: Vec<usize> = self.faces[f]
            .half_edges
            .iter()
            .filter_map(|&h| self.line_of(h))
            .collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    /// Interior angle of face `f` at its `k`-th vertex.
    pub fn tile_angle(&self, f: usize, k: usize) -> f64 {
        let vs = &self.faces[f].vertices;
        let m = vs.len();
        let prev = &self.vertices[vs[(k + m - 1) % m]].location;
        let cur = &self.vertices[vs[k]].location;
        let next = &self.vertices[vs[(k + 1) % m]].location;
        corner_angle(cur, prev, next)
    }

    /// Interior angle of face `f` at vertex `v` (which must be on it).
    pub fn angle_at(&self, f: usize, v: usize) -> Option<f64> {
        let k = self.faces[f].vertices.iter().position(|&x| x == v)?;
        Some(self.tile_angle(f, k))
    }

    /// Whether every turn along face `f` is a left turn in Klein coordinates.
    pub fn tile_is_convex(&self, f: usize) -> bool {
        let vs = &self.faces[f].vertices;
        let m = vs.len();
        (0..m).all(|k| {
            let a = self.vertices[vs[(k + m - 1) % m]].klein;
            let b = self.vertices[vs[k]].klein;
            let c = self.vertices[vs[(k + 1) % m]].klein;
            (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) > 0.0
        })
    }

    /// Whether `p` lies in the closed face `f` (Klein point-in-polygon for
    /// a convex face).
    pub fn tile_contains(&self, f: usize, p: &Point) -> bool {
        let k = p.klein();
        let vs = &self.faces[f].vertices;
        let m = vs.len();
        (0..m).all(|i| {
            let a = self.vertices[vs[i]].klein;
            let b = self.vertices[vs[(i + 1) % m]].klein;
            (b[0] - a[0]) * (k[1] - a[1]) - (b[1] - a[1]) * (k[0] - a[0]) >= -1e-15
        })
    }

    /// Complete tile nearest the basepoint; ties within 1e-9 go to the
    /// smallest sorted list of edge lines.
    pub fn seed_tile(&self) -> Option<usize> {
        let mut best: Option<(f64, Vec<usize>, usize)> = None;
        for (f, t) in self.complete_tiles() {
            let d = if self.tile_contains(f, &Point::BASE) {
                0.0
            } else {
                t.vertices
                    .iter()
                    .map(|&v| hyperbolic_distance(&Point::BASE, &self.vertices[v].location))
                    .fold(f64::INFINITY, f64::min)
            };
            let key = self.tile_lines(f);
            let better = match &best {
                None => true,
                Some((bd, bk, _)) => d < bd - 1e-9 || ((d - bd).abs() <= 1e-9 && key < *bk),
            };
            if better {
                best = Some((d, key, f));
            }
        }
        best.map(|(_, _, f)| f)
    }

    /// Closest pair of crossing vertices, with its distance.
    pub fn min_vertex_separation(&self) -> Option<(f64, usize, usize)> {
        let ids: Vec<usize> = (0..self.vertices.len())
            .filter(|&v| self.vertices[v].is_crossing())
            .collect();
        let pts: Vec<Point> = ids.iter().map(|&v| self.vertices[v].location).collect();
        let mut grid = PointGrid::new(0.05);
        for (k, p) in pts.iter().enumerate() {
            grid.insert(p, k);
        }
        let mut best = grid.closest_pair(&pts).map(|(d, a, b)| (d, ids[a], ids[b]));
        // consecutive crossings along a line, in case every pair is far apart
        for list in &self.line_vertices {
            for w in list.windows(2) {
                if self.vertices[w[0]].is_crossing() && self.vertices[w[1]].is_crossing() {
                    let d = hyperbolic_distance(
                        &self.vertices[w[0]].location,
                        &self.vertices[w[1]].location,
                    );
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, w[0], w[1]));
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigroup::classify_signature;

    fn sig() -> crate::trigroup::Signature {
        classify_signature(3, 4, 5).unwrap()
    }

    fn family(lines: Vec<Geodesic>) -> LineFamily {
        LineFamily::from_lines(sig(), lines, 3.0).unwrap()
    }

    #[test]
    fn one_line_two_faces() {
        let a = build_arrangement(family(vec![Geodesic::vertical(0.0).unwrap()])).unwrap();
        assert_eq!(a.tiles().count(), 2);
        assert_eq!(a.vertices.iter().filter(|v| v.is_crossing()).count(), 0);
        let (v, e, f) = (a.vertices.len(), a.edges.len(), a.faces.len());
        assert_eq!(v as i64 - e as i64 + f as i64, 2);
    }

    #[test]
    fn two_crossing_lines() {
        let a = build_arrangement(family(vec![
            Geodesic::vertical(0.0).unwrap(),
            Geodesic::from_reals(-1.0, 1.0).unwrap(),
        ]))
        .unwrap();
        assert_eq!(a.tiles().count(), 4);
        let crossing: Vec<_> = a.vertices.iter().filter(|v| v.is_crossing()).collect();
        assert_eq!(crossing.len(), 1);
        assert!(hyperbolic_distance(&crossing[0].location, &Point::BASE) < 1e-12);
        let (v, e, f) = (a.vertices.len(), a.edges.len(), a.faces.len());
        assert_eq!((v, e, f), (5, 8, 5));
        // each inner face is bounded by two segments and one arc
        for (_, t) in a.tiles() {
            assert_eq!(t.side_count, 3);
            assert!(t.has_arc && !t.complete);
        }
    }

    #[test]
    fn triangle_in_the_middle() {
        // three lines around the basepoint bounding a small triangle
        let base = Geodesic::from_reals(-1.5, 1.5).unwrap();
        let lines: Vec<Geodesic> = (0..3)
            .map(|k| {
                let rot =
                    crate::geom::rotation_about(&Point::BASE, TAU * k as f64 / 3.0 + 0.01).unwrap();
                rot.apply_geodesic(&base)
            })
            .collect();
        let a = build_arrangement_with(
            family(lines),
            &ArrangementConfig {
                trusted_radius: Some(3.0),
            },
        )
        .unwrap();
        let complete: Vec<_> = a.complete_tiles().collect();
        assert_eq!(complete.len(), 1);
        let (f, t) = complete[0];
        assert_eq!(t.side_count, 3);
        assert!(a.tile_is_convex(f));
        assert!(a.tile_contains(f, &Point::BASE));
        assert_eq!(a.seed_tile(), Some(f));
        let angle_sum: f64 = (0..3).map(|k| a.tile_angle(f, k)).sum();
        assert!(angle_sum < std::f64::consts::PI);
        // 3 crossings, 6 clip points; 6 + 3 + 3 ... Euler
        let (v, e, fc) = (a.vertices.len(), a.edges.len(), a.faces.len());
        assert_eq!(v as i64 - e as i64 + fc as i64, 2);
        assert_eq!(a.tiles().count(), 7);
    }

    #[test]
    fn concurrent_lines_rejected() {
        // three geodesics through i: the vertical and two semicircles
        // |z - c|^2 = 1 + c^2, which pass through i for every real c
        let through_i = |c: f64| {
            let rho = (1.0 + c * c).sqrt();
            Geodesic::from_reals(c - rho, c + rho).unwrap()
        };
        let lines = vec![
            Geodesic::vertical(0.0).unwrap(),
            through_i(0.0),
            through_i(0.7),
        ];
        for l in &lines {
            assert!(crate::geom::distance_point_to_geodesic(&Point::BASE, l) < 1e-12);
        }
        let err = build_arrangement(family(lines)).unwrap_err();
        assert!(matches!(
            err,
            ArrangementError::TriplePointDetected {
                lines: [0, 1, 2],
                ..
            }
        ));
    }
}
