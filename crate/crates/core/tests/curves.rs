use moebius_core::constructions::{minkowski, spiral_kappa, CurveSpec, FrenetCurve, SpiralCase};
use nalgebra::Vector3;
use proptest::prelude::*;

const PARAMS: [(SpiralCase, f64, f64); 6] = [
    (SpiralCase::FlatC0, 0.0, 2.0),
    (SpiralCase::FlatCneg, -1.0, 1.0),
    (SpiralCase::SphereCneg, -1.0, 1.0),
    (SpiralCase::HypCpos, 4.0, 1.0),
    (SpiralCase::HypCneg, -1.0, 1.0),
    (SpiralCase::HypC0, 0.0, 1.0),
];

fn curve(i: usize) -> FrenetCurve {
    let (case, c, r) = PARAMS[i];
    let kappa = spiral_kappa(case, c, r).unwrap();
    FrenetCurve::new(CurveSpec::new(case.ambient_curvature(), kappa, case.default_domain())).unwrap()
}

fn inner(ct: i8, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    if ct < 0 {
        minkowski(a.as_slice(), b.as_slice())
    } else {
        a.dot(b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // (γ, T, N) stays an orthonormal frame of the model space.
    #[test]
    fn frame_stays_on_the_constraint(i in 0usize..6, u in 0.0f64..1.0) {
        let c = curve(i);
        let (a, b) = c.spec().domain;
        let ct = c.spec().ambient_curvature;
        let [g, t, n] = c.frame(a + u * (b - a)).unwrap();
        let position = match ct {
            0 => g[2].abs(),
            _ => (inner(ct, &g, &g) - f64::from(ct)).abs(),
        };
        let worst = [
            position,
            (inner(ct, &t, &t) - 1.0).abs(),
            (inner(ct, &n, &n) - 1.0).abs(),
            inner(ct, &t, &n).abs(),
            if ct == 0 { 0.0 } else { inner(ct, &g, &t).abs() },
            if ct == 0 { 0.0 } else { inner(ct, &g, &n).abs() },
        ]
        .into_iter()
        .fold(0.0, f64::max);
        prop_assert!(worst < 1e-10, "constraint residual {worst:e}");
    }

    // Jets agree with central differences of the integrated positions.
    #[test]
    fn jets_match_position_differences(i in 0usize..6, u in 0.1f64..0.9) {
        let c = curve(i);
        let (a, b) = c.spec().domain;
        let s = a + u * (b - a);
        let h = 1e-3;
        let at = |t: f64| c.frame(t).unwrap()[0];
        let d1 = (at(s + h) - at(s - h)) / (2.0 * h);
        let d2 = (at(s + h) - at(s) * 2.0 + at(s - h)) / (h * h);
        let jets = c.jets(s).unwrap();
        prop_assert!((d1 - jets[1]).norm() < 1e-6);
        prop_assert!((d2 - jets[2]).norm() < 1e-5);
    }
}

#[test]
fn plane_curvature_from_positions_matches_kappa() {
    let c = curve(1);
    let kappa = c.spec().kappa;
    // Richardson-extrapolated second difference, curvature of a unit-speed plane curve
    let second = |s: f64, h: f64| {
        let at = |t: f64| c.frame(t).unwrap()[0];
        (at(s + h) - at(s) * 2.0 + at(s - h)) / (h * h)
    };
    for s in [0.7, 1.0, 1.3, 1.8] {
        let (h, half) = (second(s, 1e-2), second(s, 5e-3));
        let extrapolated = (half * 4.0 - h) / 3.0;
        let err = (extrapolated.norm() - kappa.value(s)).abs();
        assert!(err < 1e-7, "s = {s}: {err:e}");
    }
}

#[test]
fn out_of_range_domain_is_rejected() {
    let kappa = spiral_kappa(SpiralCase::FlatCneg, -1.0, 1.0).unwrap();
    assert!(FrenetCurve::new(CurveSpec::new(0, kappa, (-0.5, 1.0))).is_err());
}
