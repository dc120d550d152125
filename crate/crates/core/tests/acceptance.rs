//! End-to-end acceptance gate. Each criterion prints one PASS/FAIL line
//! (written straight to stderr so it shows without `--nocapture`), then
//! the test fails if any criterion did.

use std::io::Write;
use std::time::{Duration, Instant};

use scott_tiler::report::{
    analyze, render_svg, run_battery, Analysis, AnalysisReport, AnalyzeOptions, RenderSpec,
};
use scott_tiler::trigroup::{
    build_generators, classify_signature, default_order_cap, evaluate_word, lemma25_search,
    Geometry, GroupError, IncidenceStatus, TilingCase, Word,
};

const FAMILIES: [[u32; 3]; 7] = [
    [4, 5, 6],
    [3, 4, 5],
    [5, 5, 5],
    [4, 5, 2],
    [4, 7, 2],
    [3, 7, 2],
    [3, 8, 2],
];

struct Run {
    sig: [u32; 3],
    analysis: Analysis,
    elapsed: Duration,
}

impl Run {
    fn report(&self) -> &AnalysisReport {
        &self.analysis.report
    }

    fn case(&self) -> TilingCase {
        self.report().signature.case_label
    }

    /// Triangle tiles per the census.
    fn has_triangles(&self) -> bool {
        self.report().census.observed.contains_key(&3)
    }
}

struct Outcome {
    id: u32,
    name: &'static str,
    failures: Vec<String>,
}

fn record(id: u32, name: &'static str, failures: Vec<String>) -> Outcome {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr();
    let _ = writeln!(err, "criterion {id:>2} {status} {name}");
    for f in &failures {
        let _ = writeln!(err, "             {f}");
    }
    Outcome { id, name, failures }
}

/// Pushes `what` for each run where `ok` fails.
fn each(runs: &[Run], what: &str, ok: impl Fn(&Run) -> bool) -> Vec<String> {
    runs.iter()
        .filter(|r| !ok(r))
        .map(|r| format!("{:?}: {what}", r.sig))
        .collect()
}

fn lemma_search_witnesses() -> Vec<String> {
    let mut failures = Vec::new();
    let (x, y): (Word, Word) = ("x".parse().unwrap(), "y".parse().unwrap());
    // (4,4,2) is Euclidean; (4,5,2) stands in for it
    for [p, q, r] in [[3, 3, 4], [4, 5, 2], [3, 7, 2]] {
        let g = build_generators(&classify_signature(p, q, r).unwrap()).unwrap();
        let cap = default_order_cap(&g.sig);
        match lemma25_search(&g, &x, &y, cap) {
            Ok(w) => {
                let t = evaluate_word(&g, &w).trace().abs();
                if t <= 2.0 {
                    failures.push(format!("({p},{q},{r}): witness {w} has |trace| {t}"));
                }
            }
            Err(e) => failures.push(format!("({p},{q},{r}): {e}")),
        }
        match lemma25_search(&g, &x, &x, cap) {
            Err(GroupError::NoWitnessFound) => {}
            other => failures.push(format!("({p},{q},{r}) (x, x): {other:?}")),
        }
    }
    failures
}

fn tooling() -> Vec<String> {
    let mut failures = Vec::new();
    let options = AnalyzeOptions::default();
    let a = analyze(3, 7, 2, &options).unwrap();
    let b = analyze(3, 7, 2, &options).unwrap();

    let json = a.report.to_json();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    for field in [
        "schema_version",
        "signature",
        "scott",
        "family",
        "axioms",
        "cone_incidence",
        "census",
        "adjacency",
        "planes",
        "coloring",
        "growth",
        "timings",
        "warnings",
    ] {
        if value.get(field).is_none() {
            failures.push(format!("report lacks `{field}`"));
        }
    }
    if value["schema_version"] != 1 {
        failures.push("schema_version is not 1".into());
    }
    let bound = value["coloring"]["bound"].as_u64();
    if !matches!(bound, Some(5) | Some(7)) {
        failures.push(format!("coloring bound {bound:?}"));
    }
    match AnalysisReport::from_json(&json) {
        Ok(back) if back == a.report => {}
        Ok(_) => failures.push("round trip changed the report".into()),
        Err(e) => failures.push(format!("round trip: {e}")),
    }
    let (mut ra, mut rb) = (a.report.clone(), b.report.clone());
    ra.timings.clear();
    rb.timings.clear();
    if ra != rb {
        failures.push("two runs disagree".into());
    }
    if a.coloring.colors != b.coloring.colors {
        failures.push("two runs colored differently".into());
    }

    let svg = render_svg(
        &a.arrangement,
        Some(&a.coloring),
        Some(&a.growth),
        &RenderSpec::default(),
    );
    match roxmltree::Document::parse(&svg) {
        Ok(doc) => {
            let lines = doc
                .descendants()
                .filter(|n| n.attribute("class") == Some("line") && n.attribute("stroke").is_some())
                .count();
            if lines != a.arrangement.family.len() {
                failures.push(format!(
                    "{lines} stroked lines for {} family lines",
                    a.arrangement.family.len()
                ));
            }
            if doc.root_element().attribute("version") != Some("1.1") {
                failures.push("svg version is not 1.1".into());
            }
        }
        Err(e) => failures.push(format!("svg does not parse: {e}")),
    }
    failures
}

#[test]
fn acceptance_criteria() {
    let mut outcomes = Vec::new();

    let t = Instant::now();
    let grid = run_battery(9, None);
    let grid_time = t.elapsed();
    let hyperbolic: Vec<_> = grid
        .entries
        .iter()
        .filter(|e| e.geometry == Geometry::Hyperbolic)
        .collect();

    let mut c1: Vec<String> = hyperbolic
        .iter()
        .filter(|e| !e.infinite_order)
        .map(|e| format!("({},{},{}) trace {:?}", e.p, e.q, e.r, e.trace))
        .collect();
    if !grid.coverage_ok {
        c1.push("a hyperbolic signature has no Scott word".into());
    }
    if grid_time > Duration::from_secs(1) {
        c1.push(format!("battery took {grid_time:?}"));
    }
    outcomes.push(record(
        1,
        "Scott element has infinite order on the index-9 grid",
        c1,
    ));

    let c2 = hyperbolic
        .iter()
        .filter(|e| !e.relations_ok)
        .map(|e| format!("({},{},{})", e.p, e.q, e.r))
        .collect();
    outcomes.push(record(2, "group relations hold on the grid", c2));

    let runs: Vec<Run> = FAMILIES
        .iter()
        .map(|&[p, q, r]| {
            let t = Instant::now();
            let analysis = analyze(p, q, r, &AnalyzeOptions::default())
                .unwrap_or_else(|e| panic!("({p},{q},{r}): {e}"));
            Run {
                sig: [p, q, r],
                analysis,
                elapsed: t.elapsed(),
            }
        })
        .collect();

    let mut c3 = each(&runs, "near-triple point", |r| {
        r.report().axioms.triple_points == 0
            && r.report()
                .axioms
                .min_vertex_separation
                .is_some_and(|s| s > 1e-6)
    });
    c3.extend(each(&runs, "vertex of degree other than 4", |r| {
        r.report().axioms.vertex_degree_ok
    }));
    c3.extend(each(&runs, "Euler relation", |r| {
        r.report().axioms.euler_ok
    }));
    c3.extend(each(&runs, "slower than 30 s", |r| {
        r.elapsed < Duration::from_secs(30)
    }));
    outcomes.push(record(3, "crossing axioms on the seven families", c3));

    let mut c4 = each(&runs, "census mismatch", |r| r.report().census.matches);
    c4.extend(each(&runs, "fewer than 20 complete tiles", |r| {
        r.report().census.complete_tiles >= 20
    }));
    c4.extend(each(&runs, "crossings not right angles", |r| {
        r.case() != TilingCase::Case2
            || (r.report().axioms.right_angles_expected && r.report().axioms.right_angles_ok)
    }));
    outcomes.push(record(4, "tile census and right angles", c4));

    let mut c5 = each(&runs, "adjacency observations", |r| {
        let a = &r.report().adjacency;
        a.obs2_ok && a.obs3_ok && a.case3_edge_rule_ok
    });
    c5.extend(each(&runs, "observation not exercised", |r| {
        let a = &r.report().adjacency;
        match r.case() {
            TilingCase::Case3 => a.case3_edge_rule_applicable,
            c if c.is_case1() => a.obs2_applicable && a.obs3_applicable,
            _ => true,
        }
    }));
    outcomes.push(record(5, "tile adjacency observations", c5));

    let mut c6 = each(&runs, "four pairwise crossing lines", |r| {
        r.report().planes.k4_pass
    });
    c6.extend(each(
        &runs,
        "3-plane result disagrees with the census",
        |r| r.report().planes.k3_pass != r.has_triangles(),
    ));
    c6.extend(each(
        &runs,
        "in-disk 3-clique without a triangle tile",
        |r| r.report().planes.cliques_bound_triangles,
    ));
    outcomes.push(record(
        6,
        "4-plane everywhere, 3-plane exactly without triangles",
        c6,
    ));

    let mut c7 = each(&runs, "color bound", |r| {
        let c = &r.report().coloring;
        let bound = if r.case().has_triangles() { 7 } else { 5 };
        c.bound == bound && c.colors_used <= bound
    });
    c7.extend(each(&runs, "coloring not proper", |r| {
        r.report().coloring.proper
    }));
    c7.extend(each(&runs, "backward conflicts", |r| {
        let c = &r.report().coloring;
        c.max_backward_conflicts <= if r.case().has_triangles() { 6 } else { 4 }
    }));
    outcomes.push(record(7, "greedy coloring within 5 / 7 colors", c7));

    let mut c8 = each(&runs, "non-convex growth polygon", |r| {
        r.report().growth.all_convex
    });
    c8.extend(each(&runs, "fix-ups without triangles", |r| {
        r.report().growth.fixups_ok
    }));
    c8.extend(each(&runs, "fewer than 3 generations", |r| {
        r.report().growth.generations >= 3
    }));
    c8.extend(each(
        &runs,
        "more than 2 points inside a polygon edge",
        |r| r.report().growth.obs4_ok,
    ));
    outcomes.push(record(8, "growth polygons convex, 3+ generations", c8));

    let c9 = each(&runs, "seed line crosses more than 4 others", |r| {
        r.report().planes.max_seed_degree <= 4
    });
    outcomes.push(record(9, "seed tile degree bound", c9));

    let c10 = each(&runs, "cone point incidence", |r| {
        use IncidenceStatus::{Incident, Separated};
        let inc = &r.report().cone_incidence;
        match r.sig {
            [4, 5, 2] | [4, 7, 2] => inc.x == Incident && inc.z == Incident,
            [3, 7, 2] | [3, 8, 2] => inc.z == Incident,
            [4, 5, 6] | [5, 5, 5] => [inc.x, inc.y, inc.z] == [Separated; 3],
            _ => true,
        }
    });
    outcomes.push(record(10, "cone point incidence dichotomy", c10));

    outcomes.push(record(11, "witness search", lemma_search_witnesses()));

    let c12 = hyperbolic
        .iter()
        .filter(|e| !e.oracle_ok)
        .map(|e| {
            format!(
                "({},{},{}) {:?} vs {:?}",
                e.p, e.q, e.r, e.trace, e.trace_oracle
            )
        })
        .collect();
    outcomes.push(record(12, "trace agrees with the rotation identity", c12));

    outcomes.push(record(13, "JSON and SVG output", tooling()));

    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.failures.is_empty())
        .map(|o| format!("{} ({})", o.id, o.name))
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
