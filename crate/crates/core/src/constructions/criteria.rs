//! Checkers for the two analytic characterizations of constant Moebius
//! curvature: the warped-product criterion and the mean-curvature condition.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::kappa::Kappa;
use super::space_form::{hyperboloid_to_half_space, minkowski, Model, SpaceForm};
use crate::taylor::{Scalar, Taylor};

/// A scalar function of one variable with its first two derivatives.
pub trait Profile {
    fn jet(&self, s: f64) -> [f64; 3];
}

impl Profile for Kappa {
    fn jet(&self, s: f64) -> [f64; 3] {
        self.derivatives(s)
    }
}

/// Profile given by a formula in Taylor arithmetic.
pub struct Formula<F>(pub F);

impl<F: Fn(&Taylor) -> Taylor> Profile for Formula<F> {
    fn jet(&self, s: f64) -> [f64; 3] {
        let t = Taylor::variables(&[s], 2).remove(0);
        let v = (self.0)(&t);
        [v.value(), v.partial(&[0]), v.partial(&[0, 0])]
    }
}

/// Constant function.
pub struct Const(pub f64);

impl Profile for Const {
    fn jet(&self, _s: f64) -> [f64; 3] {
        [self.0, 0.0, 0.0]
    }
}

/// Residuals of the warped-product criterion for `φ(s)^2 ds^2 + μ(s)^2 g_2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpedResiduals {
    /// `K(g_1) = c`; identically satisfied on a one-dimensional base.
    pub base_curvature: f64,
    /// `Hess μ + c μ g_1 = 0`.
    pub hessian: f64,
    /// `K(g_2) = ‖grad μ‖^2 + c μ^2`.
    pub fiber_curvature: f64,
}

impl WarpedResiduals {
    pub fn max(&self) -> f64 {
        self.base_curvature.max(self.hessian).max(self.fiber_curvature)
    }
}

/// Max residuals over `samples` for the warped metric `φ^2 ds^2 + μ^2 g_2`
/// with `g_2` of constant curvature `fiber_curvature`, target curvature `c`.
pub fn warped_constant_curvature_check(
    base_factor: &dyn Profile,
    warp: &dyn Profile,
    c: f64,
    fiber_curvature: f64,
    samples: &[f64],
) -> WarpedResiduals {
    let mut out = WarpedResiduals {
        base_curvature: 0.0,
        hessian: 0.0,
        fiber_curvature: 0.0,
    };
    for &s in samples {
        let [phi, dphi, _] = base_factor.jet(s);
        let [mu, dmu, d2mu] = warp.jet(s);
        // Hess μ on the unit vector ∂_s / φ
        let hess = (d2mu - dphi / phi * dmu) / (phi * phi);
        let grad_sq = dmu * dmu / (phi * phi);
        out.hessian = out.hessian.max((hess + c * mu).abs());
        out.fiber_curvature = out.fiber_curvature.max((fiber_curvature - grad_sq - c * mu * mu).abs());
    }
    out
}

/// Moebius metric of a family over a curve of curvature `kappa` in a space
/// form of curvature `ambient_curvature`, seen as `κ^2 ds^2 + κ^2 g_2` with
/// `g_2` of curvature `-ambient_curvature`.
pub fn spiral_warped_check(kappa: &Kappa, ambient_curvature: i8, c: f64, samples: &[f64]) -> WarpedResiduals {
    warped_constant_curvature_check(kappa, kappa, c, -f64::from(ambient_curvature), samples)
}

/// Residuals of `Hess h + c̃ h g = 0` and `‖grad h‖^2 + c̃ h^2 = -(p-ℓ)^2 c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCurvatureResiduals {
    pub hessian: f64,
    pub gradient: f64,
}

impl MeanCurvatureResiduals {
    pub fn max(&self) -> f64 {
        self.hessian.max(self.gradient)
    }
}

pub type HeightFn<'a> = dyn Fn(&[Taylor]) -> Taylor + Send + Sync + 'a;

/// Checks the mean-curvature condition for `h = 1/‖H^g‖` given as a function
/// on the model coordinates of `space`. Hessians are intrinsic, obtained from
/// the ambient derivatives through the umbilical inclusion
/// `Hess h = D^2 h - c̃ ⟨X,Y⟩ dh(x)`. Half-space inputs are evaluated on the
/// hyperboloid through the model conversion.
pub fn mean_curvature_condition_check(
    space: &SpaceForm,
    h: &HeightFn<'_>,
    c: f64,
    p_minus_ell: usize,
    samples: &[Vec<f64>],
) -> MeanCurvatureResiduals {
    let ct = space.c();
    let target = -((p_minus_ell * p_minus_ell) as f64) * c;
    let mut out = MeanCurvatureResiduals {
        hessian: 0.0,
        gradient: 0.0,
    };
    for sample in samples {
        let (point, lorentz) = match space.model {
            Model::HalfSpace => (super::space_form::half_space_to_hyperboloid(sample), true),
            Model::Hyperboloid => (sample.clone(), true),
            _ => (sample.clone(), false),
        };
        let vars = Taylor::variables(&point, 2);
        let value = if space.model == Model::HalfSpace {
            h(&hyperboloid_to_half_space(&vars))
        } else {
            h(&vars)
        };
        let hv = value.value();
        let grad = DVector::from_vec(value.gradient());
        let hess = DMatrix::from_fn(point.len(), point.len(), |i, j| value.partial(&[i, j]));
        let frame = tangent_frame(space.model, &point);
        let x = DVector::from_vec(point.clone());
        let dh_x = grad.dot(&x);
        let k = frame.len();
        let mut grad_sq = 0.0;
        for a in 0..k {
            let da = grad.dot(&frame[a]);
            grad_sq += da * da;
            for b in 0..k {
                let metric = ambient(&frame[a], &frame[b], lorentz);
                let d2 = (hess.clone() * &frame[b]).dot(&frame[a]);
                let intrinsic = if space.model == Model::Euclidean { d2 } else { d2 - ct * metric * dh_x };
                out.hessian = out.hessian.max((intrinsic + ct * hv * metric).abs());
            }
        }
        out.gradient = out.gradient.max((grad_sq + ct * hv * hv - target).abs());
    }
    out
}

/// The same condition for a curve core: `h = 1/κ(s)` on an arclength
/// interval, `c̃` the curvature of the space form the curve lies in.
pub fn curve_mean_curvature_condition(kappa: &Kappa, ambient_curvature: i8, c: f64, samples: &[f64]) -> MeanCurvatureResiduals {
    let ct = f64::from(ambient_curvature);
    let inverse = Formula(|s: &Taylor| kappa.eval(s).recip());
    let mut out = MeanCurvatureResiduals {
        hessian: 0.0,
        gradient: 0.0,
    };
    for &s in samples {
        let [h, dh, d2h] = inverse.jet(s);
        out.hessian = out.hessian.max((d2h + ct * h).abs());
        out.gradient = out.gradient.max((dh * dh + ct * h * h + c).abs());
    }
    out
}

fn ambient(a: &DVector<f64>, b: &DVector<f64>, lorentz: bool) -> f64 {
    if lorentz {
        minkowski(a.as_slice(), b.as_slice())
    } else {
        a.dot(b)
    }
}

/// Orthonormal basis of the tangent space of the model at `x`, in ambient
/// coordinates.
fn tangent_frame(model: Model, x: &[f64]) -> Vec<DVector<f64>> {
    let len = x.len();
    let lorentz = matches!(model, Model::HalfSpace | Model::Hyperboloid);
    let p = DVector::from_vec(x.to_vec());
    let candidates: Vec<DVector<f64>> = (0..len)
        .map(|j| {
            let e = DVector::from_fn(len, |i, _| if i == j { 1.0 } else { 0.0 });
            match model {
                Model::Euclidean => e,
                // x has unit norm on the sphere and <x,x> = -1 on the hyperboloid
                Model::Sphere => &e - &p * e.dot(&p),
                Model::HalfSpace | Model::Hyperboloid => &e + &p * minkowski(e.as_slice(), x),
            }
        })
        .collect();
    let dim = if model == Model::Euclidean { len } else { len - 1 };
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(dim);
    // Gram-Schmidt, taking the largest remaining candidate first
    let mut pool = candidates;
    while frame.len() < dim && !pool.is_empty() {
        for v in pool.iter_mut() {
            for f in &frame {
                let proj = ambient(v, f, lorentz);
                *v -= f * proj;
            }
        }
        let (best, _) = pool
            .iter()
            .enumerate()
            .map(|(i, v)| (i, ambient(v, v, lorentz)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("pool is non-empty");
        let v = pool.swap_remove(best);
        let norm = ambient(&v, &v, lorentz).sqrt();
        frame.push(v / norm);
    }
    frame
}

/// Explicit solutions `h` of the mean-curvature condition: `⟨v,x⟩ + a` on
/// Euclidean space, `⟨x,v⟩` on the sphere, `⟨v,x⟩` (Lorentzian) on the
/// hyperboloid.
pub fn linear_height(model: Model, v: Vec<f64>, a: f64) -> Box<HeightFn<'static>> {
    match model {
        Model::Hyperboloid => Box::new(move |x: &[Taylor]| {
            let w: Vec<Taylor> = v.iter().map(|&c| x[0].lift(c)).collect();
            minkowski(&w, x)
        }),
        _ => Box::new(move |x: &[Taylor]| {
            let mut acc = x[0].lift(a);
            for (xi, vi) in x.iter().zip(&v) {
                acc = acc + xi.clone() * *vi;
            }
            acc
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, count: usize) -> Vec<f64> {
        (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect()
    }

    #[test]
    fn warped_examples() {
        let s = grid(0.3, 2.5, 9);
        let cone = warped_constant_curvature_check(&Const(1.0), &Formula(|t: &Taylor| t.clone()), 0.0, 1.0, &s);
        assert_eq!(cone.hessian, 0.0);
        assert!(cone.fiber_curvature < 1e-15);
        let sphere = warped_constant_curvature_check(&Const(1.0), &Formula(|t: &Taylor| t.sin()), 1.0, 1.0, &s);
        assert!(sphere.max() < 1e-10);
        let bad = warped_constant_curvature_check(&Const(1.0), &Formula(|t: &Taylor| t.clone() * t.clone()), 0.0, 1.0, &s);
        assert!((bad.hessian - 2.0).abs() < 1e-12);
    }

    #[test]
    fn euclidean_linear_height() {
        let c = -1.0;
        let v = vec![2.0 * 0.6, 2.0 * 0.8];
        let h = linear_height(Model::Euclidean, v, 3.0);
        let samples = vec![vec![0.1, 0.2], vec![-0.4, 0.9]];
        let r = mean_curvature_condition_check(&SpaceForm::euclidean(2), h.as_ref(), c, 2, &samples);
        assert!(r.max() < 1e-10, "{r:?}");
    }

    #[test]
    fn sphere_height_satisfies_hessian_equation() {
        let h = linear_height(Model::Sphere, vec![0.0, 0.0, 1.0], 0.0);
        let samples = vec![vec![0.6, 0.0, 0.8], vec![0.0, 0.28, 0.96]];
        let r = mean_curvature_condition_check(&SpaceForm::sphere(2), h.as_ref(), -1.0, 1, &samples);
        assert!(r.hessian < 1e-9);
        assert!(r.gradient < 1e-9);
    }

    #[test]
    fn hyperboloid_and_half_space_agree() {
        // ||v||^2 = 4 = -(p-ℓ)^2 c with p-ℓ = 2, c = -1
        let v = vec![0.0, 2.0, 0.0];
        let h = linear_height(Model::Hyperboloid, v.clone(), 0.0);
        let pts: Vec<Vec<f64>> = [[0.3, 0.7], [-0.2, 1.4]]
            .iter()
            .map(|z| super::super::space_form::half_space_to_hyperboloid(z))
            .collect();
        let r = mean_curvature_condition_check(&SpaceForm::hyperboloid(2), h.as_ref(), -1.0, 2, &pts);
        assert!(r.max() < 1e-9, "{r:?}");
        let hz: Box<HeightFn> = Box::new(move |z: &[Taylor]| {
            let x = super::super::space_form::half_space_to_hyperboloid(z);
            let w: Vec<Taylor> = v.iter().map(|&c| x[0].lift(c)).collect();
            minkowski(&w, &x)
        });
        let r = mean_curvature_condition_check(
            &SpaceForm::half_space(2),
            hz.as_ref(),
            -1.0,
            2,
            &[vec![0.3, 0.7], vec![-0.2, 1.4]],
        );
        assert!(r.max() < 1e-9, "{r:?}");
    }

    #[test]
    fn violated_height_is_detected() {
        let h: Box<HeightFn> = Box::new(|x: &[Taylor]| x[0].clone() * x[0].clone() + 1.0);
        let r = mean_curvature_condition_check(&SpaceForm::euclidean(2), h.as_ref(), -1.0, 1, &[vec![0.5, 0.5]]);
        assert!(r.hessian > 0.1);
    }
}
