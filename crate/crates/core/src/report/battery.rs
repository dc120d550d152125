use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{analyze, AnalyzeOptions};
use crate::geom::{Isometry, EPS_MAT};
use crate::trigroup::{
    build_generators, classify_signature, evaluate_word, scott_word, Geometry, Signature,
    TilingCase,
};

/// Scott traces must clear 2 by this much.
pub const TRACE_MARGIN: f64 = 1e-6;
/// Agreement between the matrix trace and [`trace_oracle`].
pub const ORACLE_TOL: f64 = 1e-9;

/// `|tr|` of the Scott element from the side length of the base triangle:
/// a product of rotations by `2a` and `-2b` about points `d` apart has
/// `|tr| / 2 = cos a cos b + sin a sin b cosh d`.
pub fn trace_oracle(roles: &Signature, case: TilingCase) -> f64 {
    let (p, q, r) = (roles.p as f64, roles.q as f64, roles.r as f64);
    let (a, b, c) = (PI / p, PI / q, PI / r);
    let cosh_d = (a.cos() * b.cos() + c.cos()) / (a.sin() * b.sin());
    // x y^-2 turns twice as far about the y cone point
    let b2 = if case == TilingCase::Case3 {
        2.0 * b
    } else {
        b
    };
    2.0 * (a.cos() * b2.cos() + a.sin() * b2.sin() * cosh_d).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryEntry {
    pub p: u32,
    pub q: u32,
    pub r: u32,
    pub geometry: Geometry,
    /// Unset for non-hyperbolic signatures, which are skipped.
    pub case_label: Option<TilingCase>,
    pub word: Option<String>,
    pub roles: Option<[u32; 3]>,
    pub trace: Option<f64>,
    pub trace_oracle: Option<f64>,
    pub infinite_order: bool,
    pub relations_ok: bool,
    pub oracle_ok: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub schema_version: u32,
    pub max_index: u32,
    pub signatures: usize,
    pub hyperbolic: usize,
    /// Every hyperbolic signature received a Scott word.
    pub coverage_ok: bool,
    pub failures: Vec<[u32; 3]>,
    pub pass: bool,
    pub entries: Vec<BatteryEntry>,
    /// Full analyses of every hyperbolic signature, when requested.
    pub analyses: Option<Vec<GridAnalysis>>,
}

/// Outcome of a full analysis on one grid signature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAnalysis {
    pub p: u32,
    pub q: u32,
    pub r: u32,
    pub pass: bool,
    pub case_label: Option<TilingCase>,
    pub region_radius: Option<f64>,
    pub complete_tiles: Option<usize>,
    pub generations: Option<usize>,
    pub colors_used: Option<u32>,
    pub bound: Option<u32>,
    pub failed_checks: Vec<String>,
    /// Set when the analysis stopped early.
    pub error: Option<String>,
}

fn analyze_one(p: u32, q: u32, r: u32, options: &AnalyzeOptions) -> GridAnalysis {
    match analyze(p, q, r, options) {
        Ok(a) => {
            let rep = a.report;
            GridAnalysis {
                p,
                q,
                r,
                pass: rep.pass,
                case_label: Some(rep.signature.case_label),
                region_radius: Some(rep.family.region_radius),
                complete_tiles: Some(rep.census.complete_tiles),
                generations: Some(rep.growth.generations),
                colors_used: Some(rep.coloring.colors_used),
                bound: Some(rep.coloring.bound),
                failed_checks: rep.failed_checks,
                error: None,
            }
        }
        Err(e) => GridAnalysis {
            p,
            q,
            r,
            pass: false,
            case_label: None,
            region_radius: None,
            complete_tiles: None,
            generations: None,
            colors_used: None,
            bound: None,
            failed_checks: Vec::new(),
            error: Some(e.to_string()),
        },
    }
}

/// [`run_battery`] plus a full analysis of every hyperbolic signature.
pub fn run_grid(max_index: u32, options: &AnalyzeOptions) -> GridReport {
    let mut report = run_battery(max_index, Some(options.tol_matrix));
    let analyses: Vec<GridAnalysis> = report
        .entries
        .par_iter()
        .filter(|e| e.geometry == Geometry::Hyperbolic)
        .map(|e| analyze_one(e.p, e.q, e.r, options))
        .collect();
    for a in analyses.iter().filter(|a| !a.pass) {
        if !report.failures.contains(&[a.p, a.q, a.r]) {
            report.failures.push([a.p, a.q, a.r]);
        }
    }
    report.pass = report.coverage_ok && report.failures.is_empty();
    report.analyses = Some(analyses);
    report
}

fn check(p: u32, q: u32, r: u32, tol_matrix: f64) -> BatteryEntry {
    let mut e = BatteryEntry {
        p,
        q,
        r,
        geometry: Geometry::Hyperbolic,
        case_label: None,
        word: None,
        roles: None,
        trace: None,
        trace_oracle: None,
        infinite_order: false,
        relations_ok: false,
        oracle_ok: false,
        pass: false,
    };
    let sig = match classify_signature(p, q, r) {
        Ok(s) => s,
        Err(_) => return e,
    };
    e.geometry = sig.geometry;
    if sig.geometry != Geometry::Hyperbolic {
        e.pass = true;
        return e;
    }
    let Ok(sw) = scott_word(&sig) else { return e };
    let Ok(g) = build_generators(&sw.roles) else {
        return e;
    };
    let h = evaluate_word(&g, &sw.word);
    let oracle = trace_oracle(&sw.roles, sw.case);
    let id = |m: Isometry| m.distance(&Isometry::IDENTITY) <= tol_matrix;
    e.case_label = Some(sw.case);
    e.word = Some(sw.word.to_string());
    e.roles = Some([sw.roles.p, sw.roles.q, sw.roles.r]);
    e.trace = Some(h.trace());
    e.trace_oracle = Some(oracle);
    e.infinite_order = h.trace().abs() > 2.0 + TRACE_MARGIN;
    e.relations_ok = id(g.x.pow(sw.roles.p as i64))
        && id(g.y.pow(sw.roles.q as i64))
        && id(g.z.pow(sw.roles.r as i64))
        && id(g.x * g.y * g.z);
    e.oracle_ok = (h.trace().abs() - oracle).abs() <= ORACLE_TOL;
    e.pass = e.infinite_order && e.relations_ok && e.oracle_ok;
    e
}

/// Checks the Scott word on every signature `2 <= p <= q <= r <= max_index`.
pub fn run_battery(max_index: u32, tol_matrix: Option<f64>) -> GridReport {
    let tol = tol_matrix.unwrap_or(EPS_MAT);
    let triples: Vec<[u32; 3]> = (2..=max_index)
        .flat_map(|p| (p..=max_index).flat_map(move |q| (q..=max_index).map(move |r| [p, q, r])))
        .collect();
    let entries: Vec<BatteryEntry> = triples
        .par_iter()
        .map(|&[p, q, r]| check(p, q, r, tol))
        .collect();
    let hyperbolic = entries
        .iter()
        .filter(|e| e.geometry == Geometry::Hyperbolic)
        .count();
    let coverage_ok = entries
        .iter()
        .filter(|e| e.geometry == Geometry::Hyperbolic)
        .all(|e| e.word.is_some());
    let failures: Vec<[u32; 3]> = entries
        .iter()
        .filter(|e| !e.pass)
        .map(|e| [e.p, e.q, e.r])
        .collect();
    GridReport {
        schema_version: super::SCHEMA_VERSION,
        max_index,
        signatures: entries.len(),
        hyperbolic,
        coverage_ok,
        pass: coverage_ok && failures.is_empty(),
        failures,
        entries,
        analyses: None,
    }
}
