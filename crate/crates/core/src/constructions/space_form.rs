//! Space-form models and the maps between them.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::taylor::{dot, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Euclidean,
    /// Unit sphere in `R^{k+1}`.
    Sphere,
    /// Upper half-space, last coordinate positive.
    HalfSpace,
    /// Upper sheet of `<x,x> = -1` in `L^{k+1}`, time coordinate first.
    Hyperboloid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceForm {
    /// Sectional curvature: 0, 1 or -1.
    pub curvature: i8,
    pub dim: usize,
    pub model: Model,
}

impl SpaceForm {
    pub fn new(curvature: i8, dim: usize, model: Model) -> Result<Self> {
        let consistent = matches!(
            (curvature, model),
            (0, Model::Euclidean) | (1, Model::Sphere) | (-1, Model::HalfSpace) | (-1, Model::Hyperboloid)
        );
        if !consistent || dim == 0 {
            return Err(GeomError::SpecInvalid(format!(
                "space form with curvature {curvature}, dimension {dim} and model {model:?}"
            )));
        }
        Ok(SpaceForm { curvature, dim, model })
    }

    pub fn euclidean(dim: usize) -> Self {
        SpaceForm { curvature: 0, dim, model: Model::Euclidean }
    }

    pub fn sphere(dim: usize) -> Self {
        SpaceForm { curvature: 1, dim, model: Model::Sphere }
    }

    pub fn half_space(dim: usize) -> Self {
        SpaceForm { curvature: -1, dim, model: Model::HalfSpace }
    }

    pub fn hyperboloid(dim: usize) -> Self {
        SpaceForm { curvature: -1, dim, model: Model::Hyperboloid }
    }

    pub fn c(&self) -> f64 {
        f64::from(self.curvature)
    }

    /// Number of coordinates a point of the model carries.
    pub fn coords_len(&self) -> usize {
        match self.model {
            Model::Euclidean | Model::HalfSpace => self.dim,
            Model::Sphere | Model::Hyperboloid => self.dim + 1,
        }
    }

    /// Inner product of the ambient linear space (Lorentzian for the
    /// hyperboloid, Euclidean otherwise).
    pub fn ambient_inner<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        match self.model {
            Model::Hyperboloid => minkowski(x, y),
            _ => dot(x, y),
        }
    }

    /// Distance of `x` from the model's defining constraint.
    pub fn constraint_residual(&self, x: &[f64]) -> f64 {
        match self.model {
            Model::Euclidean => 0.0,
            Model::HalfSpace => (-x[self.dim - 1]).max(0.0),
            Model::Sphere => (dot(x, x) - 1.0).abs(),
            Model::Hyperboloid => {
                let r = (minkowski(x, x) + 1.0).abs();
                if x[0] > 0.0 {
                    r
                } else {
                    r + 1.0
                }
            }
        }
    }
}

/// `-x_0 y_0 + x_1 y_1 + ...`.
pub fn minkowski<S: Scalar>(x: &[S], y: &[S]) -> S {
    let head = -(x[0].clone() * y[0].clone());
    if x.len() == 1 {
        return head;
    }
    head + dot(&x[1..], &y[1..])
}

/// Hyperboloid `H^k ⊂ L^{k+1}` to the upper half-space: with
/// `d = x_0 - x_k`, `(x_1, ..., x_{k-1}, 1) / d`.
pub fn hyperboloid_to_half_space<S: Scalar>(x: &[S]) -> Vec<S> {
    let k = x.len() - 1;
    let inv = (x[0].clone() - x[k].clone()).recip();
    let mut out: Vec<S> = x[1..k].iter().map(|c| c.clone() * inv.clone()).collect();
    out.push(inv);
    out
}

/// Inverse of [`hyperboloid_to_half_space`].
pub fn half_space_to_hyperboloid<S: Scalar>(z: &[S]) -> Vec<S> {
    let k = z.len();
    let v = z[k - 1].clone();
    let u2 = if k > 1 { dot(&z[..k - 1], &z[..k - 1]) } else { v.lift(0.0) };
    let d = v.recip();
    // x_0 + x_k = (|u|^2 + v^2) / v, x_0 - x_k = 1 / v
    let sum = (u2 + v.clone() * v.clone()) / v.clone();
    let mut out = vec![(sum.clone() + d.clone()) * 0.5];
    out.extend(z[..k - 1].iter().map(|u| u.clone() / v.clone()));
    out.push((sum - d) * 0.5);
    out
}

/// Conformal chart of the unit sphere `S^d ⊂ R^{d+1}` from `R^d`:
/// `w -> (1 - |w|^2, 2w) / (1 + |w|^2)`, sending the origin to `e_1`.
pub fn sphere_chart<S: Scalar>(w: &[S]) -> Vec<S> {
    let w2 = dot(w, w);
    let inv = (w2.clone() + 1.0).recip();
    let mut out = vec![(-w2 + 1.0) * inv.clone()];
    out.extend(w.iter().map(|c| c.clone() * 2.0 * inv.clone()));
    out
}
