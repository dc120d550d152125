//! End-to-end analysis of one signature, the JSON report it produces, the
//! index-grid battery, and SVG output.

mod battery;
mod svg;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use battery::{run_battery, run_grid, trace_oracle, BatteryEntry, GridAnalysis, GridReport};
pub use svg::{render_svg, RenderSpec, DEFAULT_PALETTE};

use crate::arrangement::{
    adjacency_observations, build_arrangement, build_line_family, check_k_plane, expected_census,
    local_degree_and_clique_checks, tile_census, verify_crossing_axioms, Arrangement,
    ArrangementError, FamilyConfig, DEFAULT_MAX_WORD_LEN, DEFAULT_RADIUS,
};
use crate::coloring::{
    greedy_color, polygon_growth_from, verify_coloring, Coloring, ColoringError, Growth,
};
use crate::geom::{
    classify_isometry, distance_point_to_geodesic, Isometry, IsometryKind, Point, EPS_MAT, EPS_PT,
};
use crate::trigroup::{
    build_generators, classify_signature, cone_point_incidence, evaluate_word, scott_axis,
    scott_word, Geometry, GroupError, IncidenceReport, IncidenceStatus, TilingCase, TriangleGroup,
    DEFAULT_ELEMENT_CAP, DEFAULT_SEPARATION,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Prefix of the warning raised when the line search did not settle.
pub const NOT_STABILIZED: &str = "NotStabilized";

#[derive(Debug, Error)]
pub enum AnalysisError {
    /// Bad input: the pipeline does not apply.
    #[error("{0}")]
    Usage(String),
    /// An internal consistency check failed.
    #[error("{0}")]
    Fatal(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl AnalysisError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AnalysisError::Usage(_) => 2,
            AnalysisError::Fatal(_) | AnalysisError::Io(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AnalysisError::Usage(_) => "usage",
            AnalysisError::Fatal(_) => "consistency",
            AnalysisError::Io(_) => "io",
        }
    }
}

impl From<GroupError> for AnalysisError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::InvalidIndex { .. }
            | GroupError::NonHyperbolicSignature { .. }
            | GroupError::UncoveredSignature { .. } => AnalysisError::Usage(e.to_string()),
            _ => AnalysisError::Fatal(e.to_string()),
        }
    }
}

impl From<ArrangementError> for AnalysisError {
    fn from(e: ArrangementError) -> Self {
        match e {
            ArrangementError::Group(g) => g.into(),
            ArrangementError::InvalidRadius(_) => AnalysisError::Usage(e.to_string()),
            _ => AnalysisError::Fatal(e.to_string()),
        }
    }
}

impl From<ColoringError> for AnalysisError {
    fn from(e: ColoringError) -> Self {
        AnalysisError::Fatal(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeedChoice {
    Auto,
    Tile(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    /// Region radius, or the starting radius when `auto_radius` is set.
    pub radius: f64,
    pub max_word_len: usize,
    pub element_cap: usize,
    /// Raise the radius in `radius_step` increments (up to `max_radius`)
    /// until the arrangement has `min_tiles` complete tiles and growth
    /// reaches `min_polygons` polygons `P_0, P_1, ...`.
    pub auto_radius: bool,
    pub radius_step: f64,
    pub max_radius: f64,
    pub min_tiles: usize,
    pub min_polygons: usize,
    pub growth_steps: usize,
    /// Separation below which two crossings count as a triple point.
    pub tol_point: f64,
    /// Tolerance for the group relations.
    pub tol_matrix: f64,
    pub seed_tile: SeedChoice,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            radius: DEFAULT_RADIUS,
            max_word_len: DEFAULT_MAX_WORD_LEN,
            element_cap: DEFAULT_ELEMENT_CAP,
            auto_radius: true,
            radius_step: 0.5,
            max_radius: 9.5,
            min_tiles: 20,
            min_polygons: 3,
            growth_steps: 64,
            tol_point: EPS_PT,
            tol_matrix: EPS_MAT,
            seed_tile: SeedChoice::Auto,
        }
    }
}

impl AnalyzeOptions {
    fn validate(&self) -> Result<(), AnalysisError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.radius) || !positive(self.tol_point) || !positive(self.tol_matrix) {
            return Err(AnalysisError::Usage(
                "radius and tolerances must be positive".into(),
            ));
        }
        if self.tol_point > 1e-3 || self.tol_matrix > 1e-3 {
            return Err(AnalysisError::Usage(
                "tolerances above 1e-3 are meaningless".into(),
            ));
        }
        if self.auto_radius && !(self.radius_step > 0.0 && self.max_radius >= self.radius) {
            return Err(AnalysisError::Usage("bad radius schedule".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureReport {
    pub p: u32,
    pub q: u32,
    pub r: u32,
    pub geometry: Geometry,
    pub case_label: TilingCase,
    /// Indices in the `(x, y, z)` roles of the Scott word.
    pub roles: [u32; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScottReport {
    pub word: String,
    pub trace: f64,
    pub class: IsometryKind,
    pub translation_length: Option<f64>,
    pub infinite_order: bool,
    /// `x^p`, `y^q`, `z^r` and `xyz` are the identity.
    pub relations_ok: bool,
    /// |trace| from the two-rotation identity, and agreement within 1e-9.
    pub trace_oracle: f64,
    pub oracle_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub num_lines: usize,
    pub word_length: usize,
    pub stabilized: bool,
    pub exhaustive: bool,
    pub region_radius: f64,
    pub trusted_radius: f64,
    pub requested_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomsReport {
    pub triple_points: usize,
    pub min_vertex_separation: Option<f64>,
    pub vertex_degree_ok: bool,
    pub euler_ok: bool,
    pub euler: [usize; 3],
    pub max_pair_intersections: usize,
    pub min_crossing_angle: Option<f64>,
    pub max_crossing_angle: Option<f64>,
    /// Case 2 crossings are right angles.
    pub right_angles_expected: bool,
    pub right_angles_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeIncidenceReport {
    #[serde(rename = "X")]
    pub x: IncidenceStatus,
    #[serde(rename = "Y")]
    pub y: IncidenceStatus,
    #[serde(rename = "Z")]
    pub z: IncidenceStatus,
    pub radius: f64,
    /// Matches the pattern expected for the case.
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub observed: BTreeMap<usize, usize>,
    pub expected: Vec<usize>,
    /// The expected set must be hit exactly, not just contain the observed.
    pub exact: bool,
    pub complete_tiles: usize,
    #[serde(rename = "match")]
    pub matches: bool,
    /// Set when a Case 2/3 census only fits after merging parallel strips;
    /// the axis family is checked as is.
    pub strip_collapse_needed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjacencySummary {
    pub obs2_ok: bool,
    pub obs2_applicable: bool,
    pub obs3_ok: bool,
    pub obs3_applicable: bool,
    pub case3_edge_rule_ok: bool,
    pub case3_edge_rule_applicable: bool,
    pub interior_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanesReport {
    pub k4_pass: bool,
    pub k3_pass: bool,
    /// `k3_pass` fails exactly when the case has triangle tiles.
    pub k3_as_expected: bool,
    pub seed_tile: usize,
    pub max_seed_degree: usize,
    pub seed_degree_ok: bool,
    pub in_disk_cliques: usize,
    pub cliques_bound_triangles: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringReport {
    /// Colors over lines with a generation.
    pub colors_used: u32,
    pub colors_used_all: u32,
    pub bound: u32,
    pub within_bound: bool,
    pub proper: bool,
    pub max_backward_conflicts: usize,
    pub conflict_bound: usize,
    pub conflicts_ok: bool,
    pub assigned_lines: usize,
    pub unassigned_lines: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// Polygons built, `P_0` through `P_{generations-1}`.
    pub generations: usize,
    pub fixups: usize,
    /// No fix-ups when the case has no triangle tiles.
    pub fixups_ok: bool,
    pub all_convex: bool,
    pub max_edge_interior_points: usize,
    pub obs4_ok: bool,
    pub polygon_sizes: Vec<usize>,
    pub seed_tile: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub signature: SignatureReport,
    pub scott: ScottReport,
    pub family: FamilyReport,
    pub axioms: AxiomsReport,
    pub cone_incidence: ConeIncidenceReport,
    pub census: CensusReport,
    pub adjacency: AdjacencySummary,
    pub planes: PlanesReport,
    pub coloring: ColoringReport,
    pub growth: GrowthReport,
    /// Milliseconds per stage.
    pub timings: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    /// Names of failed checks; empty when everything passed.
    pub failed_checks: Vec<String>,
    pub pass: bool,
}

impl AnalysisReport {
    /// Every boolean check, by name.
    pub fn checks(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("scott.infinite_order", self.scott.infinite_order),
            ("scott.relations_ok", self.scott.relations_ok),
            ("scott.oracle_ok", self.scott.oracle_ok),
            ("family.stabilized", self.family.stabilized),
            ("axioms.triple_points", self.axioms.triple_points == 0),
            ("axioms.vertex_degree_ok", self.axioms.vertex_degree_ok),
            ("axioms.euler_ok", self.axioms.euler_ok),
            (
                "axioms.max_pair_intersections",
                self.axioms.max_pair_intersections <= 1,
            ),
            ("axioms.right_angles_ok", self.axioms.right_angles_ok),
            ("cone_incidence.ok", self.cone_incidence.ok),
            ("census.match", self.census.matches),
            ("adjacency.obs2_ok", self.adjacency.obs2_ok),
            ("adjacency.obs3_ok", self.adjacency.obs3_ok),
            (
                "adjacency.case3_edge_rule_ok",
                self.adjacency.case3_edge_rule_ok,
            ),
            ("planes.k4_pass", self.planes.k4_pass),
            ("planes.k3_as_expected", self.planes.k3_as_expected),
            ("planes.seed_degree_ok", self.planes.seed_degree_ok),
            (
                "planes.cliques_bound_triangles",
                self.planes.cliques_bound_triangles,
            ),
            ("coloring.within_bound", self.coloring.within_bound),
            ("coloring.proper", self.coloring.proper),
            ("coloring.conflicts_ok", self.coloring.conflicts_ok),
            ("growth.all_convex", self.growth.all_convex),
            ("growth.fixups_ok", self.growth.fixups_ok),
            ("growth.obs4_ok", self.growth.obs4_ok),
        ]
    }

    fn finish(&mut self) {
        self.failed_checks = self
            .checks()
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(name, _)| name.to_string())
            .collect();
        let unsettled = self.warnings.iter().any(|w| w.starts_with(NOT_STABILIZED));
        self.pass = self.failed_checks.is_empty() && !unsettled;
    }

    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<AnalysisReport> {
        serde_json::from_str(s)
    }
}

/// Everything built along the way, for rendering and further inspection.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: AnalysisReport,
    pub group: TriangleGroup,
    pub arrangement: Arrangement,
    pub growth: Growth,
    pub coloring: Coloring,
}

fn ms(t: Instant) -> f64 {
    (t.elapsed().as_secs_f64() * 1e3 * 1000.0).round() / 1000.0
}

/// Incidence with cone-point orbits is tested over this radius only; the
/// pattern repeats across the plane.
const INCIDENCE_RADIUS: f64 = 3.0;

/// Word-length ceiling when the adaptive schedule lengthens the search.
const MAX_AUTO_WORD_LEN: usize = 64;

pub fn analyze(
    p: u32,
    q: u32,
    r: u32,
    options: &AnalyzeOptions,
) -> Result<Analysis, AnalysisError> {
    options.validate()?;
    let mut timings = BTreeMap::new();
    let mut warnings = Vec::new();

    let t = Instant::now();
    let sig = classify_signature(p, q, r)?;
    let sw = scott_word(&sig)?;
    let group = build_generators(&sw.roles)?;
    let axis = scott_axis(&group)?;
    let h = evaluate_word(&group, &sw.word);
    let class = classify_isometry(&h);
    let identity_within = |w: Isometry| w.distance(&Isometry::IDENTITY) <= options.tol_matrix;
    let relations_ok = identity_within(group.x.pow(sw.roles.p as i64))
        && identity_within(group.y.pow(sw.roles.q as i64))
        && identity_within(group.z.pow(sw.roles.r as i64))
        && identity_within(group.x * group.y * group.z);
    let oracle = trace_oracle(&sw.roles, sw.case);
    let scott = ScottReport {
        word: sw.word.to_string(),
        trace: h.trace(),
        class: class.kind,
        translation_length: class.translation_length,
        infinite_order: h.trace().abs() > 2.0 + 1e-6,
        relations_ok,
        trace_oracle: oracle,
        oracle_ok: (oracle - h.trace().abs()).abs() <= 1e-9,
    };
    timings.insert("group".to_string(), ms(t));

    // the smallest radius on the schedule meeting the size targets
    let t = Instant::now();
    let mut radius = options.radius;
    let mut last: Option<(Arrangement, Growth, f64)> = None;
    let (arrangement, growth) = loop {
        let mut config = FamilyConfig {
            radius,
            max_word_len: options.max_word_len,
            element_cap: options.element_cap,
        };
        let mut built = build_line_family(&group, &axis, &config);
        // longer words until the pruned search runs dry
        while options.auto_radius
            && built.as_ref().is_ok_and(|f| !f.exhaustive)
            && config.max_word_len < MAX_AUTO_WORD_LEN
        {
            config.max_word_len += 8;
            built = build_line_family(&group, &axis, &config);
        }
        let family = match built {
            Ok(f) => f,
            Err(ArrangementError::Group(GroupError::BallTooLarge { cap })) if last.is_some() => {
                let (a, g, r) = last.take().expect("checked");
                warnings.push(format!(
                    "element cap {cap} reached at radius {radius}; keeping radius {r}"
                ));
                warnings.push(format!(
                    "size targets ({} tiles, {} polygons) not met at radius {r}",
                    options.min_tiles, options.min_polygons
                ));
                radius = r;
                break (a, g);
            }
            Err(e) => return Err(e.into()),
        };
        let arrangement = build_arrangement(family)?;
        let seed = match options.seed_tile {
            SeedChoice::Auto => arrangement.seed_tile(),
            SeedChoice::Tile(f) => Some(f),
        };
        let growth = match seed {
            Some(seed) => Some(polygon_growth_from(
                &arrangement,
                seed,
                options.growth_steps,
            )?),
            None => None,
        };
        let tiles = arrangement.complete_tiles().count();
        let big_enough = tiles >= options.min_tiles
            && growth
                .as_ref()
                .is_some_and(|g| g.states.len() >= options.min_polygons);
        let next = radius + options.radius_step;
        if !options.auto_radius || big_enough || next > options.max_radius + 1e-9 {
            if options.auto_radius && !big_enough {
                warnings.push(format!(
                    "size targets ({} tiles, {} polygons) not met at radius {radius}",
                    options.min_tiles, options.min_polygons
                ));
            }
            match growth {
                Some(g) => break (arrangement, g),
                None => {
                    return Err(AnalysisError::Fatal(format!(
                        "no complete tile at radius {radius}; raise the radius"
                    )))
                }
            }
        }
        if let Some(g) = growth {
            last = Some((arrangement, g, radius));
        }
        radius = next;
    };
    if radius != options.radius {
        warnings.push(format!(
            "radius raised from {} to {radius} to reach the size targets",
            options.radius
        ));
    }
    timings.insert("arrangement".to_string(), ms(t));
    warnings.extend(arrangement.warnings.iter().cloned());

    let t = Instant::now();
    let fam = &arrangement.family;
    let family = FamilyReport {
        num_lines: fam.len(),
        word_length: fam.word_length,
        stabilized: fam.stabilized,
        exhaustive: fam.exhaustive,
        region_radius: fam.region_radius,
        trusted_radius: arrangement.trusted_radius,
        requested_radius: options.radius,
    };

    let ax = verify_crossing_axioms(&arrangement);
    let case = sw.case;
    let right_angles_expected = case == TilingCase::Case2;
    let close_pairs = match ax.min_vertex_separation {
        Some(s) if s <= options.tol_point => ax.triple_points.max(1),
        _ => ax.triple_points,
    };
    let axioms = AxiomsReport {
        triple_points: close_pairs,
        min_vertex_separation: ax.min_vertex_separation,
        vertex_degree_ok: ax.vertex_degree_ok,
        euler_ok: ax.euler_ok,
        euler: [ax.euler.0, ax.euler.1, ax.euler.2],
        max_pair_intersections: ax.max_pair_intersections,
        min_crossing_angle: ax.min_crossing_angle,
        max_crossing_angle: ax.max_crossing_angle,
        right_angles_expected,
        right_angles_ok: !right_angles_expected || ax.all_right_angles(1e-6),
    };

    let inc_radius = INCIDENCE_RADIUS.min(fam.region_radius);
    let near: Vec<_> = fam
        .lines
        .iter()
        .copied()
        .filter(|l| distance_point_to_geodesic(&Point::BASE, l) <= inc_radius)
        .collect();
    let incidence = cone_point_incidence(&group, &near, inc_radius, DEFAULT_SEPARATION)?;
    let cone_incidence = ConeIncidenceReport {
        x: incidence.x.status,
        y: incidence.y.status,
        z: incidence.z.status,
        radius: inc_radius,
        ok: incidence_as_expected(case, &incidence),
    };

    let census_map = tile_census(&arrangement)?;
    let expected = expected_census(&sig)?;
    let matches = expected.matches(&census_map);
    let census = CensusReport {
        complete_tiles: census_map.values().sum(),
        observed: census_map,
        expected: expected.allowed.iter().copied().collect(),
        exact: expected.exact,
        matches,
        strip_collapse_needed: !matches && matches!(case, TilingCase::Case2 | TilingCase::Case3),
    };

    let adj = adjacency_observations(&arrangement)?;
    let adjacency = AdjacencySummary {
        obs2_ok: adj.obs2_ok,
        obs2_applicable: adj.obs2_applicable,
        obs3_ok: adj.obs3_ok,
        obs3_applicable: adj.obs3_applicable,
        case3_edge_rule_ok: adj.case3_edge_rule_ok,
        case3_edge_rule_applicable: adj.case3_edge_rule_applicable,
        interior_edges: adj.interior_edges,
    };

    let local = local_degree_and_clique_checks(&arrangement)?;
    let k4 = check_k_plane(&arrangement.graph, 4);
    let k3 = check_k_plane(&arrangement.graph, 3);
    let planes = PlanesReport {
        k4_pass: k4.pass,
        k3_pass: k3.pass,
        k3_as_expected: k3.pass != case.has_triangles(),
        seed_tile: local.seed_tile,
        max_seed_degree: local.max_seed_degree,
        seed_degree_ok: local.seed_degree_ok,
        in_disk_cliques: local.in_disk_cliques,
        cliques_bound_triangles: local.cliques_ok,
    };
    timings.insert("checks".to_string(), ms(t));

    let t = Instant::now();
    let coloring = greedy_color(&arrangement, &growth.generations);
    let check = verify_coloring(&arrangement, &coloring.colors);
    let bound = case.color_bound() as u32;
    let coloring_report = ColoringReport {
        colors_used: coloring.colors_used_assigned,
        colors_used_all: coloring.colors_used,
        bound,
        within_bound: coloring.colors_used_assigned <= bound,
        proper: check.proper,
        max_backward_conflicts: coloring.max_backward_conflicts,
        conflict_bound: case.conflict_bound(),
        conflicts_ok: coloring.max_backward_conflicts <= case.conflict_bound(),
        assigned_lines: growth.generations.assigned(),
        unassigned_lines: coloring.unassigned.len(),
    };
    let fixups = growth.total_fixups();
    let growth_report = GrowthReport {
        generations: growth.states.len(),
        fixups,
        fixups_ok: case.has_triangles() || fixups == 0,
        all_convex: growth.all_convex(),
        max_edge_interior_points: growth.max_edge_interior_points(),
        obs4_ok: growth.max_edge_interior_points() <= 2,
        polygon_sizes: growth.states.iter().map(|s| s.tiles.len()).collect(),
        seed_tile: growth.seed,
    };
    timings.insert("coloring".to_string(), ms(t));

    let mut report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        signature: SignatureReport {
            p,
            q,
            r,
            geometry: sig.geometry,
            case_label: case,
            roles: [sw.roles.p, sw.roles.q, sw.roles.r],
        },
        scott,
        family,
        axioms,
        cone_incidence,
        census,
        adjacency,
        planes,
        coloring: coloring_report,
        growth: growth_report,
        timings,
        warnings,
        failed_checks: Vec::new(),
        pass: false,
    };
    report.finish();
    Ok(Analysis {
        report,
        group,
        arrangement,
        growth,
        coloring,
    })
}

/// Case 2: the axes pass through the X and Z orbits. Case 3: through the Z
/// orbit. Case 1: clear of all three.
fn incidence_as_expected(case: TilingCase, inc: &IncidenceReport) -> bool {
    use IncidenceStatus::{Incident, Separated};
    let want = match case {
        TilingCase::Case2 => [Some(Incident), None, Some(Incident)],
        TilingCase::Case3 => [None, None, Some(Incident)],
        TilingCase::Case1NoTriangles | TilingCase::Case1Triangles => {
            [Some(Separated), Some(Separated), Some(Separated)]
        }
    };
    [inc.x.status, inc.y.status, inc.z.status]
        .iter()
        .zip(want)
        .all(|(got, want)| want.is_none_or(|w| *got == w))
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
