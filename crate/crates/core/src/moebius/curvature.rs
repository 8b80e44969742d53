//! Curvature of the Moebius metric and the structure equations it satisfies.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{gstar_from_jet, MoebiusState};
use crate::chart::{evaluate_jet, fd_jet_oracle, ImmersionChart, PointMap};
use crate::error::{GeomError, Result};
use crate::fundamental::EPS_UMBILIC;
use crate::linalg::{gram_schmidt, orthonormal_coordinate_frame};
use crate::riemann::{kulkarni_nomizu, riemann_from_metric, Tensor4};
use crate::taylor::Taylor;

/// Riemann tensor of `g*` in chart coordinates together with `g*`.
#[derive(Debug, Clone)]
pub struct StarCurvature {
    pub riemann: Tensor4,
    pub gstar: DMatrix<f64>,
}

impl StarCurvature {
    pub fn sectional(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.riemann.sectional(&self.gstar, x, y)
    }

    /// Sectional curvatures of all coordinate 2-planes followed by `extra`
    /// random planes drawn from `rng`.
    pub fn sample_planes<R: Rng>(&self, rng: &mut R, extra: usize) -> Vec<f64> {
        let n = self.gstar.nrows();
        let unit = |i: usize| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            e
        };
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.sectional(&unit(i), &unit(j)));
            }
        }
        let mut drawn = 0;
        while drawn < extra {
            let x = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let y = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let ip = |a: &DVector<f64>, b: &DVector<f64>| crate::linalg::form(&self.gstar, a, b);
            if let Ok(pair) = gram_schmidt(&[x, y], ip, 1e-6) {
                out.push(self.sectional(&pair[0], &pair[1]));
                drawn += 1;
            }
        }
        out
    }

    /// Largest deviation of the Riemann tensor from constant curvature `c`.
    pub fn constant_curvature_residual(&self, c: f64) -> f64 {
        let model = kulkarni_nomizu(&self.gstar, &self.gstar).scale(0.5 * c);
        let frame = orthonormal_coordinate_frame(&self.gstar).expect("g* is positive definite");
        self.riemann.sub(&model).in_frame(&frame).max_abs()
    }
}

/// `R*` from the conformal change of the induced metric by `rho^2`.
pub fn star_curvature_via_conformal_change(chart: &ImmersionChart, x: &[f64]) -> Result<StarCurvature> {
    let st = MoebiusState::at(chart, x)?;
    Ok(StarCurvature {
        riemann: st.riemann_star(),
        gstar: st.gstar.clone(),
    })
}

/// `R*` from second differences of sampled `g*` values; independent of the
/// Taylor pipeline apart from order-2 jets of the chart.
pub fn star_curvature_via_fd(chart: &ImmersionChart, x: &[f64], step: f64) -> Result<StarCurvature> {
    let n = chart.intrinsic_dim;
    let inner = chart.margin(2);
    chart.domain.check(x, inner + 2.0 * step)?;
    let owned = chart.clone();
    let sampled: Arc<PointMap> = Arc::new(move |y: &[f64]| {
        match evaluate_jet(&owned, y, 2).and_then(|j| gstar_from_jet(&j, EPS_UMBILIC)) {
            Ok(g) => g.iter().copied().collect(),
            Err(_) => vec![f64::NAN; n * n],
        }
    });
    let jet = fd_jet_oracle(sampled.as_ref(), x, 2, step)?;
    let comps = jet.into_components();
    if comps.iter().any(|c| !c.coeffs().iter().all(|v| v.is_finite())) {
        return Err(GeomError::UmbilicPoint {
            rho_sq: 0.0,
            eps: EPS_UMBILIC,
        });
    }
    // column-major flattening
    let g: Vec<Vec<Taylor>> = (0..n)
        .map(|i| (0..n).map(|j| comps[j * n + i].clone()).collect())
        .collect();
    let riemann = riemann_from_metric(&g)?;
    let gstar = DMatrix::from_fn(n, n, |i, j| g[i][j].value());
    Ok(StarCurvature { riemann, gstar })
}

/// Conformal Gauss equation residual
/// `R*(X,Y,Z,W) - [<β(X,W),β(Y,Z)> - <β(X,Z),β(Y,W)> + (ψ ⊙ g*)(X,Y,Z,W)]`,
/// maximal component over a `g*`-orthonormal frame (default: Gram-Schmidt of
/// the coordinate basis).
pub fn conformal_gauss_residual(chart: &ImmersionChart, x: &[f64], frame: Option<&DMatrix<f64>>) -> Result<f64> {
    let st = MoebiusState::at(chart, x)?;
    Ok(conformal_gauss_residual_of(&st, frame))
}

pub(crate) fn conformal_gauss_residual_of(st: &MoebiusState, frame: Option<&DMatrix<f64>>) -> f64 {
    let b = &st.beta;
    let psi = st.blaschke_direct();
    let rhs = Tensor4::from_fn(st.n, |i, j, k, l| b[i][l].dot(&b[j][k]) - b[i][k].dot(&b[j][l]));
    let rhs = Tensor4::from_fn(st.n, {
        let kn = kulkarni_nomizu(&psi, &st.gstar);
        move |i, j, k, l| rhs.get(i, j, k, l) + kn.get(i, j, k, l)
    });
    let diff = st.riemann_star().sub(&rhs);
    let frame = match frame {
        Some(f) => f.clone(),
        None => st.star_frame().expect("g* is positive definite"),
    };
    diff.in_frame(&frame).max_abs()
}

/// Conformal flatness test of `g*` through sectional curvatures: for every
/// orthonormal 4-frame, `K_ij + K_kl = K_ik + K_jl`. Checked on the given
/// frame (or Gram-Schmidt of the coordinate basis) and on three further
/// frames from a fixed-seed generator.
pub fn kulkarni_flatness_residual(chart: &ImmersionChart, x: &[f64], frame: Option<&DMatrix<f64>>) -> Result<f64> {
    let n = chart.intrinsic_dim;
    if n < 4 {
        return Err(GeomError::DimensionTooSmall {
            op: "Kulkarni flatness test",
            min: 4,
            n,
        });
    }
    let st = MoebiusState::at(chart, x)?;
    let sc = StarCurvature {
        riemann: st.riemann_star(),
        gstar: st.gstar.clone(),
    };
    Ok(kulkarni_residual_of(&sc, frame))
}

pub(crate) fn kulkarni_residual_of(sc: &StarCurvature, frame: Option<&DMatrix<f64>>) -> f64 {
    let n = sc.gstar.nrows();
    let mut frames = vec![match frame {
        Some(f) => f.clone(),
        None => orthonormal_coordinate_frame(&sc.gstar).expect("g* is positive definite"),
    }];
    let mut rng = ChaCha8Rng::seed_from_u64(0x4b75_6c6b);
    while frames.len() < 4 {
        let vs: Vec<DVector<f64>> = (0..n)
            .map(|_| DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)))
            .collect();
        let ip = |a: &DVector<f64>, b: &DVector<f64>| crate::linalg::form(&sc.gstar, a, b);
        if let Ok(on) = gram_schmidt(&vs, ip, 1e-6) {
            frames.push(DMatrix::from_columns(&on));
        }
    }
    let mut worst: f64 = 0.0;
    for f in &frames {
        let r = sc.riemann.in_frame(f);
        // orthonormal frame, so K_ab = R(a,b,b,a)
        let k = |a: usize, b: usize| r.get(a, b, b, a);
        for i in 0..n {
            for j in 0..n {
                for q in 0..n {
                    for l in 0..n {
                        let distinct = i != j && i != q && i != l && j != q && j != l && q != l;
                        if distinct {
                            worst = worst.max((k(i, j) + k(q, l) - k(i, q) - k(j, l)).abs());
                        }
                    }
                }
            }
        }
    }
    worst
}

/// Normal curvature against the commutator of the Moebius shape operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciEquationReport {
    /// `max |<R^⊥(X,Y)ξ,η> - <[B_ξ,B_η]X,Y>*|` over `g*`-orthonormal `X, Y`
    /// and orthonormal normals `ξ, η`.
    pub residual: f64,
    /// Largest commutator component.
    pub commutator: f64,
    /// Largest normal-curvature component.
    pub normal_curvature: f64,
}

pub fn ricci_equation_residual(chart: &ImmersionChart, x: &[f64]) -> Result<RicciEquationReport> {
    let st = MoebiusState::at(chart, x)?;
    Ok(ricci_equation_of(&st))
}

pub(crate) fn ricci_equation_of(st: &MoebiusState) -> RicciEquationReport {
    let n = st.n;
    let frame = st.star_frame().expect("g* is positive definite");
    let normals = &st.fundamental.normal_frame;
    let p = &st.projector;
    // normal curvature operators R^⊥(∂_i, ∂_j) = P [∂_i P, ∂_j P] P
    let rperp: Vec<Vec<DMatrix<f64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let a = &st.dprojector[i];
                    let b = &st.dprojector[j];
                    p * (a * b - b * a) * p
                })
                .collect()
        })
        .collect();
    // Moebius shape operators B_ξ as coordinate endomorphisms
    let shape = |xi: &DVector<f64>| {
        let b = DMatrix::from_fn(n, n, |i, j| st.beta[i][j].dot(xi));
        &st.gstar_inv * b
    };
    let bs: Vec<DMatrix<f64>> = normals.iter().map(shape).collect();
    let mut report = RicciEquationReport {
        residual: 0.0,
        commutator: 0.0,
        normal_curvature: 0.0,
    };
    for (a, xi) in normals.iter().enumerate() {
        for (b, eta) in normals.iter().enumerate() {
            let comm = &bs[a] * &bs[b] - &bs[b] * &bs[a];
            let lhs_form = DMatrix::from_fn(n, n, |i, j| (eta.transpose() * &rperp[i][j] * xi)[(0, 0)]);
            let rhs_form = st.gstar.clone() * comm;
            // rhs_form[(l, k)] = <[B_ξ,B_η] ∂_k, ∂_l>*
            let lhs = frame.transpose() * lhs_form * &frame;
            let rhs = (frame.transpose() * rhs_form * &frame).transpose();
            for i in 0..n {
                for j in 0..n {
                    report.residual = report.residual.max((lhs[(i, j)] - rhs[(i, j)]).abs());
                    report.commutator = report.commutator.max(rhs[(i, j)].abs());
                    report.normal_curvature = report.normal_curvature.max(lhs[(i, j)].abs());
                }
            }
        }
    }
    report
}

/// Whether a Riemannian product of two space forms with the given curvatures
/// and dimensions is conformally flat.
pub fn product_conformal_flatness(c1: f64, d1: usize, c2: f64, d2: usize) -> bool {
    debug_assert!(d1 + d2 >= 3);
    if d1 == 1 || d2 == 1 {
        return true;
    }
    let scale = 1f64.max(c1.abs()).max(c2.abs());
    (c1 + c2).abs() <= 1e-12 * scale
}
