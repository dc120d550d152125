use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Arrangement, ArrangementError, EdgeKind};
use crate::geom::{angle_between_at, hyperbolic_distance, Point};
use crate::trigroup::{scott_word, GroupError, Signature, TilingCase};

/// Separation below which two crossing vertices count as one point.
pub const TRIPLE_POINT_SEPARATION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingAxioms {
    /// Two distinct geodesics share at most one point; holds structurally.
    pub max_pair_intersections: usize,
    /// Crossing vertices closer than [`TRIPLE_POINT_SEPARATION`].
    pub triple_points: usize,
    pub min_vertex_separation: Option<f64>,
    pub separation_witness: Option<(usize, usize)>,
    pub vertex_degree_ok: bool,
    /// Crossing vertices whose face-degree is not 4.
    pub bad_vertices: Vec<usize>,
    pub euler: (usize, usize, usize),
    pub euler_ok: bool,
    /// Acute crossing angles over the in-disk vertices.
    pub min_crossing_angle: Option<f64>,
    pub max_crossing_angle: Option<f64>,
}

impl CrossingAxioms {
    pub fn pass(&self) -> bool {
        self.max_pair_intersections <= 1
            && self.triple_points == 0
            && self.vertex_degree_ok
            && self.euler_ok
    }

    pub fn all_right_angles(&self, tol: f64) -> bool {
        match (self.min_crossing_angle, self.max_crossing_angle) {
            (Some(lo), Some(hi)) => (lo - FRAC_PI_2).abs() <= tol && (hi - FRAC_PI_2).abs() <= tol,
            _ => true,
        }
    }
}

pub fn verify_crossing_axioms(a: &Arrangement) -> CrossingAxioms {
    let separation = a.min_vertex_separation();
    let triple_points = a
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_crossing())
        .filter(|(i, v)| {
            // count each close pair once, from its lower vertex
            a.vertices
                .iter()
                .enumerate()
                .skip(i + 1)
                .filter(|(_, w)| w.is_crossing())
                .any(|(_, w)| {
                    hyperbolic_distance(&v.location, &w.location) <= TRIPLE_POINT_SEPARATION
                })
        })
        .count();
    let bad_vertices: Vec<usize> = (0..a.vertices.len())
        .filter(|&v| a.vertices[v].is_crossing() && a.vertex_faces[v].len() != 4)
        .collect();
    let (v, e, f) = (a.vertices.len(), a.edges.len(), a.faces.len());
    let angles: Vec<f64> = a
        .crossings
        .par_iter()
        .filter(|c| c.vertex.is_some())
        .filter_map(|c| {
            angle_between_at(
                &a.family.lines[c.lines.0],
                &a.family.lines[c.lines.1],
                &c.point,
            )
            .ok()
        })
        .collect();
    CrossingAxioms {
        max_pair_intersections: 1,
        triple_points,
        min_vertex_separation: separation.map(|s| s.0),
        separation_witness: separation.map(|s| (s.1, s.2)),
        vertex_degree_ok: bad_vertices.is_empty(),
        bad_vertices,
        euler: (v, e, f),
        euler_ok: v as i64 - e as i64 + f as i64 == 2,
        min_crossing_angle: angles.iter().copied().reduce(f64::min),
        max_crossing_angle: angles.iter().copied().reduce(f64::max),
    }
}

/// Number of complete tiles per side count.
pub fn tile_census(a: &Arrangement) -> Result<BTreeMap<usize, usize>, ArrangementError> {
    let mut census = BTreeMap::new();
    for (_, t) in a.complete_tiles() {
        *census.entry(t.side_count).or_insert(0) += 1;
    }
    if census.is_empty() {
        return Err(ArrangementError::NoCompleteTiles);
    }
    Ok(census)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedCensus {
    pub case: TilingCase,
    pub allowed: BTreeSet<usize>,
    /// Every allowed side count must actually occur (Cases 2 and 3), rather
    /// than the observed counts merely being a subset.
    pub exact: bool,
}

impl ExpectedCensus {
    pub fn matches(&self, census: &BTreeMap<usize, usize>) -> bool {
        let observed: BTreeSet<usize> = census
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&s, _)| s)
            .collect();
        if self.exact {
            observed == self.allowed
        } else {
            observed.is_subset(&self.allowed)
        }
    }
}

pub fn expected_census(sig: &Signature) -> Result<ExpectedCensus, GroupError> {
    let sw = scott_word(sig)?;
    let (p, q, r) = (
        sw.roles.p as usize,
        sw.roles.q as usize,
        sw.roles.r as usize,
    );
    let (allowed, exact) = match sw.case {
        TilingCase::Case2 => (BTreeSet::from([q]), true),
        TilingCase::Case3 => (BTreeSet::from([3, q]), true),
        TilingCase::Case1NoTriangles | TilingCase::Case1Triangles => {
            (BTreeSet::from([p, q, 2 * r]), false)
        }
    };
    Ok(ExpectedCensus {
        case: sw.case,
        allowed,
        exact,
    })
}

/// Two complete tiles sharing an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileAdjacency {
    pub edge: usize,
    pub tiles: (usize, usize),
    pub sides: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyReport {
    pub case: TilingCase,
    pub interior_edges: usize,
    /// No two quadrilaterals share an edge.
    pub obs2_applicable: bool,
    pub obs2_ok: bool,
    pub obs2_witness: Option<TileAdjacency>,
    /// Every neighbour of a triangle is a `2r`-gon with `2r >= 6`.
    pub obs3_applicable: bool,
    pub obs3_ok: bool,
    pub obs3_witness: Option<TileAdjacency>,
    /// Every interior edge separates a triangle from a `q`-gon.
    pub case3_edge_rule_applicable: bool,
    pub case3_edge_rule_ok: bool,
    pub case3_witness: Option<TileAdjacency>,
}

impl AdjacencyReport {
    pub fn pass(&self) -> bool {
        self.obs2_ok && self.obs3_ok && self.case3_edge_rule_ok
    }
}

/// Edges with a complete tile on both sides.
pub fn complete_adjacencies(a: &Arrangement) -> Vec<TileAdjacency> {
    a.edges
        .iter()
        .enumerate()
        .filter(|(_, e)| matches!(e.kind, EdgeKind::Segment { .. }))
        .filter_map(|(e, _)| {
            let (f, g) = (a.face_of(2 * e), a.face_of(2 * e + 1));
            let (tf, tg) = (&a.faces[f], &a.faces[g]);
            (tf.complete && tg.complete).then_some(TileAdjacency {
                edge: e,
                tiles: (f, g),
                sides: (tf.side_count, tg.side_count),
            })
        })
        .collect()
}

/// Observations on which tiles may share an edge. Checks that do not apply
/// to the signature's case are reported as passing with `applicable` unset.
pub fn adjacency_observations(a: &Arrangement) -> Result<AdjacencyReport, GroupError> {
    let sw = scott_word(&a.family.sig)?;
    let (q, r) = (sw.roles.q as usize, sw.roles.r as usize);
    let adj = complete_adjacencies(a);
    let case1 = sw.case.is_case1();
    let case3 = sw.case == TilingCase::Case3;

    let obs2_witness = adj.iter().copied().find(|t| t.sides == (4, 4));
    let obs3_witness = adj.iter().copied().find(|t| {
        let bad = |s: usize, o: usize| s == 3 && (o != 2 * r || o < 6);
        bad(t.sides.0, t.sides.1) || bad(t.sides.1, t.sides.0)
    });
    let case3_witness = adj.iter().copied().find(|t| {
        let (m, n) = (t.sides.0.min(t.sides.1), t.sides.0.max(t.sides.1));
        (m, n) != (3, q)
    });
    Ok(AdjacencyReport {
        case: sw.case,
        interior_edges: adj.len(),
        obs2_applicable: case1,
        obs2_ok: !case1 || obs2_witness.is_none(),
        obs2_witness: obs2_witness.filter(|_| case1),
        obs3_applicable: case1,
        obs3_ok: !case1 || obs3_witness.is_none(),
        obs3_witness: obs3_witness.filter(|_| case1),
        case3_edge_rule_applicable: case3,
        case3_edge_rule_ok: !case3 || case3_witness.is_none(),
        case3_witness: case3_witness.filter(|_| case3),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalChecks {
    pub seed_tile: usize,
    /// Lines carrying the seed tile's edges.
    pub seed_lines: Vec<usize>,
    /// Largest number of other seed lines any seed line crosses.
    pub max_seed_degree: usize,
    pub seed_degree_ok: bool,
    /// 3-cliques of the intersection graph with all three crossings in the
    /// trusted sub-disk.
    pub in_disk_cliques: usize,
    pub cliques_ok: bool,
    /// A clique that does not bound a triangular complete tile.
    pub clique_witness: Option<[usize; 3]>,
}

impl LocalChecks {
    pub fn pass(&self) -> bool {
        self.seed_degree_ok && self.cliques_ok
    }
}

pub fn local_degree_and_clique_checks(a: &Arrangement) -> Result<LocalChecks, ArrangementError> {
    let seed = a.seed_tile().ok_or(ArrangementError::NoCompleteTiles)?;
    let seed_lines = a.tile_lines(seed);
    let max_seed_degree = seed_lines
        .iter()
        .map(|&l| {
            seed_lines
                .iter()
                .filter(|&&m| a.graph.has_edge(l, m))
                .count()
        })
        .max()
        .unwrap_or(0);

    let crossing_at: HashMap<(usize, usize), Point> =
        a.crossings.iter().map(|c| (c.lines, c.point)).collect();
    let triangle_tiles: BTreeSet<Vec<usize>> = a
        .complete_tiles()
        .filter(|(_, t)| t.side_count == 3)
        .map(|(f, _)| a.tile_lines(f))
        .collect();
    let in_disk = |p: &Point| hyperbolic_distance(&Point::BASE, p) <= a.trusted_radius;
    let cliques: Vec<[usize; 3]> = a
        .graph
        .triangles()
        .into_iter()
        .filter(|&[i, j, k]| {
            [(i, j), (i, k), (j, k)]
                .iter()
                .all(|pair| crossing_at.get(pair).is_some_and(in_disk))
        })
        .collect();
    let clique_witness = cliques
        .iter()
        .copied()
        .find(|c| !triangle_tiles.contains(c.as_slice()));
    Ok(LocalChecks {
        seed_tile: seed,
        max_seed_degree,
        seed_degree_ok: max_seed_degree <= 4,
        seed_lines,
        in_disk_cliques: cliques.len(),
        cliques_ok: clique_witness.is_none(),
        clique_witness,
    })
}
