// `!(a <= b)` is deliberate throughout: NaN distances must fall on the reject side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::{Deserialize, Serialize};

use super::grid::PointGrid;
use super::ArrangementError;
use crate::geom::{
    classify_isometry, distance_point_to_geodesic, hyperbolic_distance, Geodesic, Point, EPS_PT,
};
use crate::trigroup::{
    evaluate_word, scott_word, BallExplorer, Signature, TriangleGroup, Word, DEFAULT_ELEMENT_CAP,
};

/// Default region radius (hyperbolic units about the basepoint).
pub const DEFAULT_RADIUS: f64 = 3.0;
/// Default maximum word length for the family search.
pub const DEFAULT_MAX_WORD_LEN: usize = 14;

/// Lines closer than this to tangency with the clip circle are dropped.
const TANGENCY_MARGIN: f64 = 1e-6;

/// Translates of one axis that meet the closed disk of radius
/// `region_radius` about the basepoint, sorted by canonical endpoint key.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineFamily {
    pub lines: Vec<Geodesic>,
    /// One group word per line carrying the axis onto it.
    pub witnesses: Vec<Word>,
    pub sig: Signature,
    pub region_radius: f64,
    /// Word length reached by the search.
    pub word_length: usize,
    /// The line count stayed flat for two consecutive word lengths, or the
    /// search was exhausted.
    pub stabilized: bool,
    /// The pruned search ran out of elements, so every translate meeting
    /// the disk is present.
    pub exhaustive: bool,
    /// Line count after each word length.
    pub counts: Vec<usize>,
    pub warnings: Vec<String>,
}

impl LineFamily {
    /// A family made of explicit lines, for tests and ad hoc arrangements.
    pub fn from_lines(
        sig: Signature,
        lines: Vec<Geodesic>,
        region_radius: f64,
    ) -> Result<LineFamily, ArrangementError> {
        let mut kept: Vec<Geodesic> = Vec::new();
        let mut warnings = Vec::new();
        for l in lines {
            let d = distance_point_to_geodesic(&Point::BASE, &l);
            if !(d <= region_radius - TANGENCY_MARGIN) {
                if d <= region_radius {
                    warnings.push(format!(
                        "line {l} is tangent to the region boundary; dropped"
                    ));
                }
                continue;
            }
            if kept.iter().any(|k| k.approx_eq(&l)) {
                continue;
            }
            kept.push(l);
        }
        if kept.is_empty() {
            return Err(ArrangementError::EmptyFamily);
        }
        kept.sort_by(|a, b| a.key_cmp(b));
        let n = kept.len();
        Ok(LineFamily {
            lines: kept,
            witnesses: vec![Word::empty(); n],
            sig,
            region_radius,
            word_length: 0,
            stabilized: true,
            exhaustive: true,
            counts: vec![n],
            warnings,
        })
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// Parameters of the translate search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub radius: f64,
    pub max_word_len: usize,
    pub element_cap: usize,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig {
            radius: DEFAULT_RADIUS,
            max_word_len: DEFAULT_MAX_WORD_LEN,
            element_cap: DEFAULT_ELEMENT_CAP,
        }
    }
}

fn foot_point(l: &Geodesic) -> Point {
    let d = distance_point_to_geodesic(&Point::BASE, l);
    let p = l.point_at(0.0);
    debug_assert!((hyperbolic_distance(&p, &Point::BASE) - d).abs() < 1e-6);
    p
}

/// Collects the translates `g.axis` meeting the disk of radius
/// `config.radius`, raising the word length until the search is exhausted
/// or `config.max_word_len` is reached.
///
/// Each line meeting the disk is `g.axis` for some `g` moving the probe to
/// within a bounded distance of the basepoint, so a pruned search finds them
/// all once it runs out of elements.
pub fn build_line_family(
    group: &TriangleGroup,
    axis: &Geodesic,
    config: &FamilyConfig,
) -> Result<LineFamily, ArrangementError> {
    if !(config.radius > 0.0) {
        return Err(ArrangementError::InvalidRadius(config.radius));
    }
    let sw = scott_word(&group.sig)?;
    let h = evaluate_word(group, &sw.word);
    if !h.apply_geodesic(axis).approx_eq(axis) {
        return Err(ArrangementError::NotScottAxis);
    }
    let period = classify_isometry(&h).translation_length.ok_or_else(|| {
        ArrangementError::Group(crate::trigroup::GroupError::Consistency(
            "Scott element is not hyperbolic".into(),
        ))
    })?;
    // A line meeting the disk carries a translate of the probe's projection
    // onto the axis within half a period of its own foot, hence within
    // acosh(cosh R cosh(period/2)) of the basepoint.
    let probe = group.probe_point();
    let reach = (config.radius.cosh() * (period / 2.0).cosh()).acosh()
        + distance_point_to_geodesic(&probe, axis);
    let bound = reach + group.prune_slack();
    let mut explorer = BallExplorer::new(group, Some((Point::BASE, bound)), config.element_cap);

    let mut lines: Vec<Geodesic> = Vec::new();
    let mut witness_ids: Vec<usize> = Vec::new();
    let mut grid = PointGrid::new(0.05);
    let mut warnings = Vec::new();
    let mut counts = Vec::new();

    let mut consider = |idx: usize,
                        explorer: &BallExplorer,
                        lines: &mut Vec<Geodesic>,
                        warnings: &mut Vec<String>| {
        let g = explorer.elements()[idx].isometry;
        let l = g.apply_geodesic(axis);
        let d = distance_point_to_geodesic(&Point::BASE, &l);
        if !(d <= config.radius - TANGENCY_MARGIN) {
            if d <= config.radius {
                warnings.push(format!(
                    "translate {l} is tangent to the region boundary; dropped"
                ));
            }
            return;
        }
        let f = foot_point(&l);
        if grid.candidates(&f).any(|j| lines[j].approx_eq(&l)) {
            return;
        }
        grid.insert(&f, lines.len());
        lines.push(l);
        witness_ids.push(idx);
    };

    consider(0, &explorer, &mut lines, &mut warnings);
    counts.push(lines.len());
    while !explorer.exhausted() && explorer.level() < config.max_word_len {
        let added = explorer.step()?;
        for idx in added {
            consider(idx, &explorer, &mut lines, &mut warnings);
        }
        counts.push(lines.len());
    }
    let exhaustive = explorer.exhausted();
    let n = counts.len();
    let flat = n >= 3 && counts[n - 1] == counts[n - 2] && counts[n - 2] == counts[n - 3];
    let stabilized = exhaustive || flat;
    if !stabilized {
        warnings.push(format!(
            "NotStabilized: line count still changing at word length {}",
            explorer.level()
        ));
    }
    warnings.extend(explorer.warnings().iter().cloned());

    // canonical order
    let mut order: Vec<usize> = (0..lines.len()).collect();
    order.sort_by(|&a, &b| lines[a].key_cmp(&lines[b]));
    let sorted_lines = order.iter().map(|&i| lines[i]).collect();
    let witnesses = order
        .iter()
        .map(|&i| explorer.word(witness_ids[i]))
        .collect();

    Ok(LineFamily {
        lines: sorted_lines,
        witnesses,
        sig: group.sig,
        region_radius: config.radius,
        word_length: explorer.level(),
        stabilized,
        exhaustive,
        counts,
        warnings,
    })
}

/// Drops one line of every pair whose endpoints come within `EPS_PT`
/// (near-tangent at infinity), recording a warning per drop.
pub(crate) fn drop_near_tangent_pairs(family: &mut LineFamily) {
    let n = family.lines.len();
    let mut drop = vec![false; n];
    for i in 0..n {
        if drop[i] {
            continue;
        }
        for j in i + 1..n {
            if !drop[j] && family.lines[i].endpoint_gap(&family.lines[j]) < EPS_PT {
                drop[j] = true;
                family.warnings.push(format!(
                    "degenerate pair: lines {} and {} nearly share an endpoint; dropped the latter",
                    family.lines[i], family.lines[j]
                ));
            }
        }
    }
    if drop.iter().any(|&d| d) {
        let mut k = 0;
        family.lines.retain(|_| {
            k += 1;
            !drop[k - 1]
        });
        let mut k = 0;
        family.witnesses.retain(|_| {
            k += 1;
            !drop[k - 1]
        });
    }
}
