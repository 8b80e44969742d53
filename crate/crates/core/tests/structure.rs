use moebius_core::constructions::{transform_chart, ConformalMap, Control};
use moebius_core::normal::{multiplicity_census, normal_bundle_flatness, GROUPING_TOL};
use moebius_core::sampling::point_rng;
use moebius_core::{build_family, evaluate_jet, fundamental_data, principal_normals, FamilySpec, SpiralCase};
use proptest::prelude::*;

fn codim_two() -> moebius_core::Family {
    build_family(&FamilySpec::spiral(SpiralCase::FlatCneg, -1.0, 1.0, 5, 2)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // Grouping works in curvature-normalized units, so dilating the
    // submanifold must not change the multiplicity pattern.
    #[test]
    fn grouping_is_scale_invariant(log_scale in -3.0f64..3.0, u in 0.1f64..0.9) {
        let fam = codim_two();
        let scaled = transform_chart(&fam.chart, &ConformalMap::Dilation { factor: log_scale.exp() }).unwrap();
        let d = &fam.chart.domain;
        let x: Vec<f64> = (0..5).map(|i| d.lower()[i] + u * (d.upper()[i] - d.lower()[i])).collect();
        let pattern = |chart| {
            let jet = evaluate_jet(chart, &x, 2).unwrap();
            let fd = fundamental_data(&jet, 5).unwrap();
            principal_normals(&fd, GROUPING_TOL, &mut point_rng(1, 0)).unwrap()
        };
        let (a, b) = (pattern(&fam.chart), pattern(&scaled));
        prop_assert_eq!(a.pattern(), b.pattern());
        prop_assert_eq!(a.ambiguity.is_some(), b.ambiguity.is_some());
    }
}

#[test]
fn census_on_a_codimension_two_family() {
    let fam = codim_two();
    let points = fam.chart.domain.grid(&[3, 2, 2, 2, 2], 0.05);
    let rows = multiplicity_census(&fam.chart, &points, GROUPING_TOL, 11);
    assert_eq!(rows.len(), points.len());
    for row in rows {
        assert!(row.error.is_none(), "{row:?}");
        assert!(row.moore_bound && row.single_multiple, "{row:?}");
        assert_eq!(row.pattern.iter().sum::<usize>(), 5);
    }
}

#[test]
fn census_is_independent_of_thread_count() {
    let fam = codim_two();
    let points = fam.chart.domain.grid(&[2, 2, 2, 2, 2], 0.05);
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = serial.install(|| multiplicity_census(&fam.chart, &points, GROUPING_TOL, 5));
    let b = multiplicity_census(&fam.chart, &points, GROUPING_TOL, 5);
    assert_eq!(a, b);
}

#[test]
fn twisted_control_refuses_a_principal_decomposition() {
    let chart = Control::TwistedSurface.chart();
    let jet = evaluate_jet(&chart, &[0.1, -0.2], 2).unwrap();
    let fd = fundamental_data(&jet, 2).unwrap();
    assert!(normal_bundle_flatness(&fd) > 1e-3);
    assert!(principal_normals(&fd, GROUPING_TOL, &mut point_rng(0, 0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Inversions preserve principal multiplicities; the cone over a sphere
    // spiral has one principal curvature of multiplicity n - 1.
    #[test]
    fn inversion_keeps_the_multiplicity_pattern(
        center in prop::collection::vec(-3.0f64..3.0, 5),
        radius in 0.5f64..3.0,
        u in prop::collection::vec(0.05f64..0.95, 4),
    ) {
        let fam = build_family(&FamilySpec::spiral(SpiralCase::SphereCneg, -1.0, 1.0, 4, 1)).unwrap();
        let map = ConformalMap::Inversion { center, radius };
        let Ok(inverted) = transform_chart(&fam.chart, &map) else { return Ok(()) };
        let d = &fam.chart.domain;
        let x: Vec<f64> = (0..4).map(|i| d.lower()[i] + u[i] * (d.upper()[i] - d.lower()[i])).collect();
        let jet = evaluate_jet(&inverted, &x, 2).unwrap();
        let fd = fundamental_data(&jet, 4).unwrap();
        let pnd = principal_normals(&fd, GROUPING_TOL, &mut point_rng(3, 0)).unwrap();
        prop_assert_eq!(pnd.pattern(), vec![3, 1]);
        prop_assert!(pnd.off_diagonal < 1e-8 * pnd.scale);
    }
}
