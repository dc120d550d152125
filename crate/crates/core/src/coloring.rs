//! Convex polygon growth from a seed tile and the greedy coloring it orders.
//!
//! `P_0` is the seed tile. `P_{n+1}` adds every tile meeting the boundary of
//! `P_n`; when that leaves reflex corners, each must sit at the apex of a
//! newly added triangle, and the fourth tile there is adjoined until the union
//! is convex. Lines get the generation of the first `P_n` they meet, and are
//! colored greedily in generation order.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::Arrangement;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ColoringError {
    #[error("no complete seed tile")]
    NoSeedTile,
    #[error("seed tile {0} is not a complete tile")]
    BadSeedTile(usize),
    #[error("reflex vertex {vertex} in generation {generation} is not the apex of a new triangle")]
    NonConvexUnfixable { vertex: usize, generation: usize },
    #[error("growth polygon in generation {generation} is not a disk")]
    NotADisk { generation: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthState {
    pub generation: usize,
    /// Sorted face ids whose union is `P_n`.
    pub tiles: Vec<usize>,
    /// Boundary vertices in counterclockwise order, straight points included.
    pub boundary: Vec<usize>,
    /// Boundary vertices where the interior angle is below π.
    pub corners: usize,
    pub convex: bool,
    /// Tiles adjoined by the fix-up in this step, and the rounds it took.
    pub fixups: usize,
    pub fixup_rounds: usize,
    /// Most crossing points strictly inside one edge of the polygon.
    pub max_edge_interior_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthStop {
    /// The next step needs a tile outside the trusted sub-disk.
    Exhausted,
    StepLimit,
}

/// Generation of each line: the least `n` with the line meeting `P_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationMap(pub Vec<Option<usize>>);

impl GenerationMap {
    pub fn get(&self, line: usize) -> Option<usize> {
        self.0[line]
    }

    pub fn assigned(&self) -> usize {
        self.0.iter().filter(|g| g.is_some()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub seed: usize,
    pub states: Vec<GrowthState>,
    pub generations: GenerationMap,
    pub stop: GrowthStop,
}

impl Growth {
    /// Index of the last polygon built, `N` for `P_0 .. P_N`.
    pub fn last_generation(&self) -> usize {
        self.states.len() - 1
    }

    pub fn total_fixups(&self) -> usize {
        self.states.iter().map(|s| s.fixups).sum()
    }

    pub fn all_convex(&self) -> bool {
        self.states.iter().all(|s| s.convex)
    }

    pub fn max_edge_interior_points(&self) -> usize {
        self.states
            .iter()
            .map(|s| s.max_edge_interior_points)
            .max()
            .unwrap_or(0)
    }
}

/// Growth from the arrangement's seed tile.
pub fn polygon_growth(a: &Arrangement, steps: usize) -> Result<Growth, ColoringError> {
    let seed = a.seed_tile().ok_or(ColoringError::NoSeedTile)?;
    polygon_growth_from(a, seed, steps)
}

pub fn polygon_growth_from(
    a: &Arrangement,
    seed: usize,
    steps: usize,
) -> Result<Growth, ColoringError> {
    if seed >= a.faces.len() || !a.faces[seed].complete {
        return Err(ColoringError::BadSeedTile(seed));
    }
    let mut generations = vec![None; a.family.len()];
    let mut tiles = BTreeSet::from([seed]);
    let first = describe(a, &tiles, 0, 0, 0)?;
    assign(a, &tiles, 0, &mut generations);
    let mut states = vec![first];
    let mut stop = GrowthStop::StepLimit;

    for generation in 1..=steps {
        let prev = &states[generation - 1];
        let mut next = tiles.clone();
        let mut outside = false;
        for &v in &prev.boundary {
            for &f in &a.vertex_faces[v] {
                outside |= !a.faces[f].complete;
                next.insert(f);
            }
        }
        if outside {
            stop = GrowthStop::Exhausted;
            break;
        }
        let Some((fixups, rounds)) = fix_up(a, &tiles, &mut next, generation)? else {
            stop = GrowthStop::Exhausted;
            break;
        };
        let state = describe(a, &next, generation, fixups, rounds)?;
        assign(a, &next, generation, &mut generations);
        tiles = next;
        states.push(state);
    }
    Ok(Growth {
        seed,
        states,
        generations: GenerationMap(generations),
        stop,
    })
}

fn assign(a: &Arrangement, tiles: &BTreeSet<usize>, generation: usize, out: &mut [Option<usize>]) {
    for &f in tiles {
        for l in a.tile_lines(f) {
            out[l].get_or_insert(generation);
        }
    }
}

/// Faces of `tiles` around `v`, as a bitmask over `a.vertex_faces[v]`.
fn inside_mask(a: &Arrangement, tiles: &BTreeSet<usize>, v: usize) -> Vec<bool> {
    a.vertex_faces[v]
        .iter()
        .map(|f| tiles.contains(f))
        .collect()
}

/// Adjoins the fourth tile at every reflex vertex until none is left.
/// Returns `None` when a needed tile is not complete.
fn fix_up(
    a: &Arrangement,
    before: &BTreeSet<usize>,
    tiles: &mut BTreeSet<usize>,
    generation: usize,
) -> Result<Option<(usize, usize)>, ColoringError> {
    let mut added = 0;
    let mut rounds = 0;
    loop {
        let reflex: Vec<usize> = boundary_vertices(a, tiles)
            .into_iter()
            .filter(|&v| faces_inside(a, tiles, v) >= 3)
            .collect();
        if reflex.is_empty() {
            return Ok(Some((added, rounds)));
        }
        rounds += 1;
        for v in reflex {
            let faces = &a.vertex_faces[v];
            let mask = inside_mask(a, tiles, v);
            let k = faces.len();
            let Some(missing) = (0..k).find(|&i| !mask[i]) else {
                continue;
            };
            if k != 4 || mask.iter().filter(|&&m| m).count() != 3 {
                return Err(ColoringError::NonConvexUnfixable {
                    vertex: v,
                    generation,
                });
            }
            let middle = faces[(missing + 2) % k];
            let apex_ok = a.faces[middle].side_count == 3
                && !a.faces[middle].has_arc
                && !before.contains(&middle);
            if !apex_ok {
                return Err(ColoringError::NonConvexUnfixable {
                    vertex: v,
                    generation,
                });
            }
            let s = faces[missing];
            if !a.faces[s].complete {
                return Ok(None);
            }
            if tiles.insert(s) {
                added += 1;
            }
        }
    }
}

/// Number of faces of `tiles` around `v`. At a crossing of two lines the
/// interior angle of the union is below, equal to or above π exactly when
/// this is 1, 2 (adjacent faces) or 3.
fn faces_inside(a: &Arrangement, tiles: &BTreeSet<usize>, v: usize) -> usize {
    a.vertex_faces[v]
        .iter()
        .filter(|f| tiles.contains(f))
        .count()
}

fn is_boundary(a: &Arrangement, tiles: &BTreeSet<usize>, h: usize) -> bool {
    tiles.contains(&a.face_of(h)) && !tiles.contains(&a.face_of(h ^ 1))
}

fn boundary_vertices(a: &Arrangement, tiles: &BTreeSet<usize>) -> Vec<usize> {
    let mut vs: Vec<usize> = tiles
        .iter()
        .flat_map(|&f| a.faces[f].half_edges.iter().copied())
        .filter(|&h| is_boundary(a, tiles, h))
        .map(|h| a.origin(h))
        .collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// Walks the boundary of the union and checks it is one simple cycle.
fn describe(
    a: &Arrangement,
    tiles: &BTreeSet<usize>,
    generation: usize,
    fixups: usize,
    fixup_rounds: usize,
) -> Result<GrowthState, ColoringError> {
    let not_disk = || ColoringError::NotADisk { generation };
    let boundary_hs: Vec<usize> = tiles
        .iter()
        .flat_map(|&f| a.faces[f].half_edges.iter().copied())
        .filter(|&h| is_boundary(a, tiles, h))
        .collect();
    let start = *boundary_hs.first().ok_or_else(not_disk)?;
    let mut cycle = Vec::with_capacity(boundary_hs.len());
    let mut h = start;
    loop {
        cycle.push(h);
        let mut g = a.next(h);
        while !is_boundary(a, tiles, g) {
            g = a.next(g ^ 1);
        }
        h = g;
        if h == start {
            break;
        }
        if cycle.len() > boundary_hs.len() {
            return Err(not_disk());
        }
    }
    if cycle.len() != boundary_hs.len() {
        return Err(not_disk());
    }
    let boundary: Vec<usize> = cycle.iter().map(|&h| a.origin(h)).collect();
    let mut seen = boundary.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != boundary.len() {
        return Err(not_disk());
    }

    let counts: Vec<usize> = boundary
        .iter()
        .map(|&v| faces_inside(a, tiles, v))
        .collect();
    for (&v, &c) in boundary.iter().zip(&counts) {
        // two faces must be neighbours around the vertex, or the union is
        // pinched there
        if c == 2 {
            let mask = inside_mask(a, tiles, v);
            let k = mask.len();
            if !(0..k).any(|i| mask[i] && mask[(i + 1) % k]) {
                return Err(not_disk());
            }
        }
    }
    let convex = counts.iter().all(|&c| c <= 2);
    let is_corner = |c: usize| c == 1;
    let corners = counts.iter().filter(|&&c| is_corner(c)).count();
    // longest run of straight points between consecutive corners
    let mut max_run = 0;
    if corners > 0 {
        let first = counts.iter().position(|&c| is_corner(c)).unwrap_or(0);
        let n = counts.len();
        let mut run = 0;
        for k in 1..=n {
            if is_corner(counts[(first + k) % n]) {
                max_run = max_run.max(run);
                run = 0;
            } else {
                run += 1;
            }
        }
    }
    Ok(GrowthState {
        generation,
        tiles: tiles.iter().copied().collect(),
        boundary,
        corners,
        convex,
        fixups,
        fixup_rounds,
        max_edge_interior_points: max_run,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    /// Colors `1..=colors_used`, one per line.
    pub colors: Vec<u32>,
    pub colors_used: u32,
    /// Most colors among lines with a generation.
    pub colors_used_assigned: u32,
    /// Already-colored crossing lines at the moment each line was colored.
    pub backward_conflicts: Vec<usize>,
    pub max_backward_conflicts: usize,
    /// Lines without a generation, colored last.
    pub unassigned: Vec<usize>,
}

/// Colors lines by generation, then family order, each with the smallest
/// color not used by an already-colored line crossing it.
pub fn greedy_color(a: &Arrangement, generations: &GenerationMap) -> Coloring {
    let n = a.family.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&l| (generations.get(l).unwrap_or(usize::MAX), l));
    let mut colors = vec![0u32; n];
    let mut backward_conflicts = vec![0; n];
    for &l in &order {
        let used: BTreeSet<u32> = a
            .graph
            .neighbors(l)
            .iter()
            .map(|&m| colors[m])
            .filter(|&c| c > 0)
            .collect();
        backward_conflicts[l] = a
            .graph
            .neighbors(l)
            .iter()
            .filter(|&&m| colors[m] > 0)
            .count();
        colors[l] = (1..).find(|c| !used.contains(c)).unwrap_or(1);
    }
    let assigned = |l: &usize| generations.get(*l).is_some();
    Coloring {
        colors_used: colors.iter().copied().max().unwrap_or(0),
        colors_used_assigned: (0..n)
            .filter(assigned)
            .map(|l| colors[l])
            .max()
            .unwrap_or(0),
        max_backward_conflicts: (0..n)
            .filter(assigned)
            .map(|l| backward_conflicts[l])
            .max()
            .unwrap_or(0),
        unassigned: (0..n).filter(|l| !assigned(l)).collect(),
        colors,
        backward_conflicts,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringCheck {
    pub proper: bool,
    /// Two crossing lines with the same color.
    pub witness: Option<(usize, usize)>,
}

/// Scans every crossing pair of lines for a shared color.
pub fn verify_coloring(a: &Arrangement, colors: &[u32]) -> ColoringCheck {
    let witness = a
        .crossings
        .par_iter()
        .map(|c| c.lines)
        .filter(|&(i, j)| colors[i] == colors[j])
        .min();
    ColoringCheck {
        proper: witness.is_none(),
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{build_arrangement_with, ArrangementConfig, LineFamily};
    use crate::geom::{rotation_about, Geodesic, Point};
    use crate::trigroup::classify_signature;
    use std::f64::consts::TAU;

    fn arrangement(lines: Vec<Geodesic>) -> Arrangement {
        let sig = classify_signature(3, 4, 5).unwrap();
        let fam = LineFamily::from_lines(sig, lines, 3.0).unwrap();
        build_arrangement_with(
            fam,
            &ArrangementConfig {
                trusted_radius: Some(3.0),
            },
        )
        .unwrap()
    }

    fn star(k: usize, half_width: f64) -> Vec<Geodesic> {
        let base = Geodesic::from_reals(-half_width, half_width).unwrap();
        (0..k)
            .map(|i| {
                rotation_about(&Point::BASE, TAU * i as f64 / k as f64 + 0.01)
                    .unwrap()
                    .apply_geodesic(&base)
            })
            .collect()
    }

    #[test]
    fn single_line_one_color() {
        let a = arrangement(vec![Geodesic::vertical(0.0).unwrap()]);
        let c = greedy_color(&a, &GenerationMap(vec![None]));
        assert_eq!(c.colors, vec![1]);
        assert!(verify_coloring(&a, &c.colors).proper);
    }

    #[test]
    fn seed_only_growth_is_convex() {
        let a = arrangement(star(3, 1.5));
        let g = polygon_growth(&a, 0).unwrap();
        assert_eq!(g.states.len(), 1);
        assert!(g.states[0].convex);
        assert_eq!(g.states[0].corners, 3);
        assert_eq!(g.stop, GrowthStop::StepLimit);
        assert_eq!(g.generations.assigned(), 3);
    }

    #[test]
    fn growth_stops_at_clipped_tiles() {
        let a = arrangement(star(3, 1.5));
        let g = polygon_growth(&a, 5).unwrap();
        assert_eq!(g.stop, GrowthStop::Exhausted);
        assert_eq!(g.last_generation(), 0);
    }

    #[test]
    fn adversarial_coloring_rejected() {
        let a = arrangement(star(3, 1.5));
        let check = verify_coloring(&a, &[1, 1, 2]);
        assert!(!check.proper);
        assert_eq!(check.witness, Some((0, 1)));
        let c = greedy_color(&a, &GenerationMap(vec![Some(0); 3]));
        assert_eq!(c.colors_used, 3);
        assert_eq!(c.max_backward_conflicts, 2);
        assert!(verify_coloring(&a, &c.colors).proper);
        // properness survives permuting colors
        let permuted: Vec<u32> = c.colors.iter().map(|&x| 4 - x).collect();
        assert!(verify_coloring(&a, &permuted).proper);
    }
}
