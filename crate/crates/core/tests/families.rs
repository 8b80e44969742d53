use moebius_core::constructions::{CoreSpec, SpiralCase};
use moebius_core::scenario::JET_TOLERANCES;
use moebius_core::{build_family, evaluate_jet, Family, FamilyKind, FamilySpec, MoebiusState};
use proptest::prelude::*;
use std::sync::OnceLock;

const PARAMS: [(SpiralCase, f64, f64); 6] = [
    (SpiralCase::FlatC0, 0.0, 2.0),
    (SpiralCase::FlatCneg, -1.0, 1.0),
    (SpiralCase::SphereCneg, -1.0, 1.0),
    (SpiralCase::HypCpos, 4.0, 1.0),
    (SpiralCase::HypCneg, -1.0, 1.0),
    (SpiralCase::HypC0, 0.0, 1.0),
];

fn families() -> &'static [Family] {
    static CELL: OnceLock<Vec<Family>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out: Vec<Family> = PARAMS
            .iter()
            .map(|&(case, c, r)| build_family(&FamilySpec::spiral(case, c, r, 3, 1)).unwrap())
            .collect();
        out.push(build_family(&FamilySpec::spiral(SpiralCase::SphereCneg, -1.0, 1.0, 4, 2)).unwrap());
        out.push(
            build_family(&FamilySpec {
                kind: FamilyKind::Cylinder,
                core: CoreSpec::ProductOfCurves { c: -1.0, r: 1.0, x1: (0.3, 0.7), x2: (-1.0, 1.0) },
                n: 4,
                p: 2,
                ell: 0,
                fiber: None,
            })
            .unwrap(),
        );
        out
    })
}

fn point(fam: &Family, u: &[f64]) -> Vec<f64> {
    let d = &fam.chart.domain;
    (0..d.dim())
        .map(|i| {
            let (a, b) = (d.lower()[i] + 0.05, d.upper()[i] - 0.05);
            a + u[i % u.len()] * (b - a)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rho_matches_the_family_formula(i in 0usize..8, u in prop::collection::vec(0.0f64..1.0, 4)) {
        let fam = &families()[i];
        let x = point(fam, &u);
        let st = MoebiusState::at(&fam.chart, &x).unwrap();
        let expected = fam.expected_rho(&x).unwrap();
        prop_assert!((st.rho - expected).abs() < 1e-8 * expected.max(1.0), "{} vs {}", st.rho, expected);
    }

    #[test]
    fn exact_jets_match_finite_differences(i in 0usize..8, u in prop::collection::vec(0.0f64..1.0, 4)) {
        let fam = &families()[i];
        let x = point(fam, &u);
        let exact = evaluate_jet(&fam.chart, &x, 3).unwrap();
        let fd = evaluate_jet(&fam.chart.to_finite_difference(), &x, 3).unwrap();
        for k in 1..=3 {
            let diff = exact.max_diff_at_order(&fd, k);
            prop_assert!(diff < JET_TOLERANCES[k - 1], "order {k}: {diff:e}");
        }
    }

    #[test]
    fn moebius_curvature_is_the_target(i in 0usize..8, u in prop::collection::vec(0.0f64..1.0, 4)) {
        let fam = &families()[i];
        let x = point(fam, &u);
        let c = fam.expected_kstar.unwrap();
        let star = moebius_core::moebius::star_curvature_via_conformal_change(&fam.chart, &x).unwrap();
        prop_assert!(star.constant_curvature_residual(c) < 1e-6);
    }
}

#[test]
fn spiral_cores_satisfy_both_criteria() {
    for fam in &families()[..6] {
        let x = point(fam, &[0.3, 0.6, 0.2]);
        assert!(fam.warped_residuals(&x).unwrap().max() < 1e-9, "{}", fam.chart.label);
        assert!(fam.mean_curvature_residuals(&x).unwrap().max() < 1e-9, "{}", fam.chart.label);
    }
}

#[test]
fn spiral_families_use_the_matching_construction() {
    let kinds: Vec<FamilyKind> = families()[..6].iter().map(|f| f.kind).collect();
    assert_eq!(
        kinds,
        vec![
            FamilyKind::Cylinder,
            FamilyKind::Cylinder,
            FamilyKind::GeneralizedCone,
            FamilyKind::Rotational,
            FamilyKind::Rotational,
            FamilyKind::Rotational,
        ]
    );
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(build_family(&FamilySpec::spiral(SpiralCase::FlatCneg, 1.0, 1.0, 3, 1)).is_err());
    assert!(build_family(&FamilySpec::spiral(SpiralCase::HypCpos, -1.0, 1.0, 3, 1)).is_err());
    assert!(build_family(&FamilySpec::spiral(SpiralCase::FlatC0, 0.0, 1.0, 1, 1)).is_err());
}
