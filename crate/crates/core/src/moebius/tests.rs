use std::sync::Arc;

use nalgebra::DVector;

use super::*;
use crate::chart::{DomainBox, GenericMap, ImmersionChart};
use crate::taylor::Scalar;

/// Graph of a cubic over a 3-dimensional domain in `R^4`.
struct CubicGraph;
impl GenericMap for CubicGraph {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let (a, b, c) = (x[0].clone(), x[1].clone(), x[2].clone());
        let h = a.square() * 0.3 + b.square() * 0.5 - c.square() * 0.2
            + a.clone() * b.clone() * c.clone() * 0.1
            + a.powi(3) * 0.05
            + (b.clone() * 0.7).sin() * c.clone() * 0.2;
        vec![a, b, c, h]
    }
}

/// `(s, u, s^2 + u^2/2, s u)`: a surface in `R^4` with curved normal bundle.
struct Twisted;
impl GenericMap for Twisted {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let (s, u) = (x[0].clone(), x[1].clone());
        vec![s.clone(), u.clone(), s.square() + u.square() * 0.5, s * u]
    }
}

/// Round circle of radius `r` times `R^{k}`.
struct CircleCylinder {
    r: f64,
    k: usize,
}
impl GenericMap for CircleCylinder {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let t = x[0].clone() / self.r;
        let mut out = vec![t.cos() * self.r, t.sin() * self.r];
        out.extend(x[1..=self.k].iter().cloned());
        out
    }
}

fn chart<M: GenericMap + 'static>(map: M, n: usize, m: usize) -> ImmersionChart {
    let dom = DomainBox::new(vec![-0.6; n], vec![0.6; n]).unwrap();
    ImmersionChart::exact(dom, m, Arc::new(map), "test")
}

const X3: [f64; 3] = [0.21, -0.13, 0.17];

#[test]
fn cylinder_has_flat_moebius_metric() {
    let c = chart(CircleCylinder { r: 2.0, k: 2 }, 3, 4);
    let st = MoebiusState::at(&c, &[0.1, 0.2, -0.1]).unwrap();
    assert!((st.rho - 0.5).abs() < 1e-13);
    assert!(st.drho.norm() < 1e-13);
    assert!(st.riemann_star().max_abs() < 1e-12);
}

#[test]
fn beta_is_traceless_with_fixed_norm() {
    let c = chart(CubicGraph, 3, 4);
    let st = MoebiusState::at(&c, &X3).unwrap();
    assert!(st.beta_trace().norm() < 1e-12);
    assert!((st.beta_norm_sq() - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn blaschke_formulas_agree() {
    let c = chart(CubicGraph, 3, 4);
    let st = MoebiusState::at(&c, &X3).unwrap();
    let direct = st.blaschke_direct();
    let via = st.blaschke_via_ric().unwrap();
    let scale = direct.amax().max(1.0);
    assert!((&direct - &via).amax() / scale < 1e-9, "{direct}\n{via}");
    let (tr, predicted) = st.blaschke_trace();
    assert!((tr - predicted).abs() < 1e-9);
}

#[test]
fn conformal_change_matches_metric_curvature() {
    let c = chart(CubicGraph, 3, 4);
    let st = MoebiusState::at(&c, &X3).unwrap();
    let fd_curv = star_curvature_via_fd(&c, &X3, 1e-3).unwrap();
    let r = st.riemann_star();
    assert!(r.symmetry_residual() < 1e-10);
    assert!(r.max_abs_diff(&fd_curv.riemann) < 1e-6, "{}", r.max_abs_diff(&fd_curv.riemann));
}

#[test]
fn conformal_gauss_holds() {
    let c = chart(CubicGraph, 3, 4);
    let res = conformal_gauss_residual(&c, &X3, None).unwrap();
    assert!(res < 1e-9, "{res}");
}

#[test]
fn lift_is_null_and_isometric() {
    let c = chart(CubicGraph, 3, 4);
    let (metric, null) = moebius_lift_metric_check(&c, &X3).unwrap();
    assert!(metric < 1e-12 && null < 1e-12, "{metric} {null}");
}

#[test]
fn moebius_form_identities() {
    let c = chart(CubicGraph, 3, 4);
    let rep = moebius_form_closedness(&c, &X3, 1e-3).unwrap();
    assert!(rep.exact > 1e-3, "{rep:?}");
    assert!(rep.agreement < 1e-7, "{rep:?}");
    assert!(rep.ricci_identity < 1e-9, "{rep:?}");
}

#[test]
fn ricci_equation_on_twisted_surface() {
    let c = chart(Twisted, 2, 4);
    let rep = ricci_equation_residual(&c, &[0.2, 0.3]).unwrap();
    assert!(rep.commutator > 1e-3, "{rep:?}");
    assert!(rep.residual < 1e-10, "{rep:?}");
    assert!((rep.normal_curvature - rep.commutator).abs() < 1e-10);
}

#[test]
fn kulkarni_separates_flat_from_curved() {
    let flat = chart(CircleCylinder { r: 1.5, k: 3 }, 4, 5);
    let x = [0.1, 0.2, -0.3, 0.05];
    assert!(kulkarni_flatness_residual(&flat, &x, None).unwrap() < 1e-10);
    struct Quartic;
    impl GenericMap for Quartic {
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            let h = x[0].square() * 0.4 + x[1].square() * 0.1 - x[2].square() * 0.3
                + x[3].square() * 0.2
                + x[0].clone() * x[1].clone() * x[3].clone() * 0.5;
            let mut out = x.to_vec();
            out.push(h);
            out
        }
    }
    let curved = chart(Quartic, 4, 5);
    assert!(kulkarni_flatness_residual(&curved, &x, None).unwrap() > 1e-3);
}

#[test]
fn umbilic_points_are_rejected() {
    struct Sphere;
    impl GenericMap for Sphere {
        fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
            vec![x[0].cos() * x[1].cos(), x[0].cos() * x[1].sin(), x[0].sin()]
        }
    }
    let c = chart(Sphere, 2, 3);
    assert!(matches!(
        MoebiusState::at(&c, &[0.1, 0.2]),
        Err(GeomError::UmbilicPoint { .. })
    ));
}

#[test]
fn products_of_space_forms() {
    assert!(product_conformal_flatness(1.0, 2, -1.0, 2));
    assert!(product_conformal_flatness(0.0, 3, 0.0, 2));
    assert!(product_conformal_flatness(3.0, 1, 2.0, 4));
    assert!(!product_conformal_flatness(1.0, 2, 0.0, 2));
    assert!(!product_conformal_flatness(1.0, 2, 1.0, 3));
}

#[test]
fn snapshot_is_consistent() {
    let c = chart(CubicGraph, 3, 4);
    let d = moebius_data(&c, &X3).unwrap();
    let st = MoebiusState::at(&c, &X3).unwrap();
    assert_eq!(d.sec_star.len(), 3);
    assert_eq!(d.beta.len(), 1);
    let e = |i: usize| {
        let mut v = DVector::zeros(3);
        v[i] = 1.0;
        v
    };
    let k01 = st.riemann_star().sectional(&st.gstar, &e(0), &e(1));
    assert!((d.sec_star[0].curvature - k01).abs() < 1e-14);
}
