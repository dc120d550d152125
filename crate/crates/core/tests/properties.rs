use std::collections::BTreeMap;
use std::f64::consts::TAU;

use proptest::prelude::*;

use scott_tiler::arrangement::{
    build_arrangement, build_arrangement_with, tile_census, verify_crossing_axioms,
    ArrangementConfig, ArrangementError, LineFamily,
};
use scott_tiler::coloring::{greedy_color, polygon_growth, verify_coloring, GenerationMap};
use scott_tiler::geom::{rotation_about, Geodesic, Point};
use scott_tiler::report::{analyze, AnalyzeOptions};
use scott_tiler::trigroup::{classify_signature, Geometry};

const REGION: f64 = 2.5;

/// `(3, q, q)` up to order: the axis runs through the order-3 cone point.
fn is_three_q_q(mut s: [u32; 3]) -> bool {
    s.sort_unstable();
    s[0] == 3 && s[1] == s[2] && s[1] >= 4
}

fn lines_strategy() -> impl Strategy<Value = Vec<Geodesic>> {
    // endpoints spread over the real line, so most chords cross the disk
    prop::collection::vec((-6.0f64..6.0, 0.05f64..8.0), 1..12).prop_map(|v| {
        v.into_iter()
            .filter_map(|(a, w)| Geodesic::from_reals(a, a + w).ok())
            .collect()
    })
}

fn family(lines: Vec<Geodesic>) -> Result<LineFamily, ArrangementError> {
    LineFamily::from_lines(classify_signature(4, 5, 6).unwrap(), lines, REGION)
}

/// Tiles per side count, with the trusted disk fixed so the two sides of a
/// comparison agree on what "complete" means.
fn census_of(lines: Vec<Geodesic>) -> Option<BTreeMap<usize, usize>> {
    let fam = family(lines).ok()?;
    let a = build_arrangement_with(
        fam,
        &ArrangementConfig {
            trusted_radius: Some(REGION),
        },
    )
    .ok()?;
    tile_census(&a).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_arrangements_satisfy_the_axioms(lines in lines_strategy()) {
        let Ok(fam) = family(lines) else { return Ok(()) };
        match build_arrangement(fam) {
            Ok(a) => {
                let ax = verify_crossing_axioms(&a);
                prop_assert!(ax.euler_ok, "{:?}", ax.euler);
                prop_assert!(ax.vertex_degree_ok, "{:?}", ax.bad_vertices);
                prop_assert_eq!(ax.triple_points, 0);
            }
            // a random near-concurrence is reported, not mis-built
            Err(ArrangementError::TriplePointDetected { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn greedy_coloring_is_proper_and_permutation_stable(lines in lines_strategy()) {
        let Ok(fam) = family(lines) else { return Ok(()) };
        let Ok(a) = build_arrangement(fam) else { return Ok(()) };
        let generations = match polygon_growth(&a, 8) {
            Ok(g) => g.generations,
            Err(_) => GenerationMap(vec![None; a.family.len()]),
        };
        let c = greedy_color(&a, &generations);
        prop_assert!(verify_coloring(&a, &c.colors).proper);
        prop_assert_eq!(&greedy_color(&a, &generations).colors, &c.colors);
        let k = c.colors_used;
        let shifted: Vec<u32> = c.colors.iter().map(|&x| x % k + 1).collect();
        prop_assert!(verify_coloring(&a, &shifted).proper);
    }

    #[test]
    fn census_is_invariant_under_rotation_about_the_basepoint(
        lines in lines_strategy(),
        theta in 0.1f64..(TAU - 0.1),
    ) {
        let rot = rotation_about(&Point::BASE, theta).unwrap();
        let moved: Vec<Geodesic> = lines.iter().map(|l| rot.apply_geodesic(l)).collect();
        if let (Some(a), Some(b)) = (census_of(lines), census_of(moved)) {
            prop_assert_eq!(a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn group_arrangements_pass_at_fixed_radius(p in 2u32..8, q in 3u32..8, r in 3u32..8) {
        let sig = classify_signature(p, q, r).unwrap();
        prop_assume!(sig.geometry == Geometry::Hyperbolic);
        prop_assume!(!is_three_q_q([p, q, r]));
        let options = AnalyzeOptions {
            radius: 3.0,
            auto_radius: false,
            ..AnalyzeOptions::default()
        };
        let report = analyze(p, q, r, &options).unwrap().report;
        prop_assert!(report.axioms.euler_ok && report.axioms.vertex_degree_ok);
        prop_assert!(report.census.matches, "{:?}", report.census);
        prop_assert!(report.coloring.proper && report.coloring.within_bound);
        prop_assert!(report.planes.k4_pass);
    }
}

// The axis of x y^-1 in (3,q,q) passes through the x cone point, so three of
// its translates (turned by x) meet there and the arrangement has a triple
// point. Prediction: incidence with the X orbit, and a fatal triple point.
#[test]
fn three_q_q_axis_meets_the_order_three_cone_point() {
    use scott_tiler::arrangement::build_line_family;
    use scott_tiler::arrangement::FamilyConfig;
    use scott_tiler::trigroup::{
        build_generators, cone_point_incidence, scott_axis, scott_word, IncidenceStatus,
    };
    for q in 4..=7 {
        let sw = scott_word(&classify_signature(3, q, q).unwrap()).unwrap();
        let g = build_generators(&sw.roles).unwrap();
        let axis = scott_axis(&g).unwrap();
        let inc = cone_point_incidence(&g, &[axis], 2.0, 1e-3).unwrap();
        assert_eq!(inc.x.status, IncidenceStatus::Incident, "q = {q}");
        assert_eq!(inc.y.status, IncidenceStatus::Separated);

        let family = build_line_family(&g, &axis, &FamilyConfig::default()).unwrap();
        assert!(matches!(
            build_arrangement(family),
            Err(ArrangementError::TriplePointDetected { .. })
        ));
    }
}
