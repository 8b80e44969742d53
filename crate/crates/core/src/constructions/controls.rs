//! Negative-control charts: generic immersions that violate flat normal
//! bundle or conformal flatness.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::space_form::sphere_chart;
use crate::chart::{DomainBox, GenericMap, ImmersionChart};
use crate::taylor::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Control {
    /// The complex curve `w = z^2 / 2` in `C^2 = R^4`; its curvature ellipse
    /// is a circle, so the shape operators never commute.
    TwistedSurface,
    /// Triaxial ellipsoid `E^3 ⊂ R^4` times a line, `n = 4`.
    EllipsoidCrossLine,
    /// Graph of a cubic polynomial over `R^4`, `n = 4`.
    PolynomialGraph,
}

impl Control {
    pub const ALL: [Control; 3] = [Control::TwistedSurface, Control::EllipsoidCrossLine, Control::PolynomialGraph];

    pub fn name(self) -> &'static str {
        match self {
            Control::TwistedSurface => "twisted_surface",
            Control::EllipsoidCrossLine => "ellipsoid_cross_line",
            Control::PolynomialGraph => "polynomial_graph",
        }
    }

    pub fn chart(self) -> ImmersionChart {
        let cube = |n: usize, h: f64| DomainBox::new(vec![-h; n], vec![h; n]).expect("valid box");
        match self {
            Control::TwistedSurface => ImmersionChart::exact(cube(2, 0.5), 4, Arc::new(TwistedSurface), self.name()),
            Control::EllipsoidCrossLine => {
                ImmersionChart::exact(cube(4, 0.5), 5, Arc::new(EllipsoidCrossLine), self.name())
            }
            Control::PolynomialGraph => ImmersionChart::exact(cube(4, 0.5), 5, Arc::new(PolynomialGraph), self.name()),
        }
    }
}

struct TwistedSurface;

impl GenericMap for TwistedSurface {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let (s, u) = (x[0].clone() + 0.3, x[1].clone() - 0.2);
        vec![s.clone(), u.clone(), (s.square() - u.square()) * 0.5, s * u]
    }
}

const SEMI_AXES: [f64; 4] = [1.0, 1.3, 1.7, 2.2];

struct EllipsoidCrossLine;

impl GenericMap for EllipsoidCrossLine {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let w: Vec<S> = x[..3].iter().map(|c| c.clone() + 0.15).collect();
        let mut out: Vec<S> = sphere_chart(&w)
            .into_iter()
            .zip(SEMI_AXES)
            .map(|(c, a)| c * a)
            .collect();
        out.push(x[3].clone());
        out
    }
}

struct PolynomialGraph;

impl GenericMap for PolynomialGraph {
    fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let h = x[0].square() * 0.4 + x[1].square() * 0.1 - x[2].square() * 0.3
            + x[3].square() * 0.2
            + x[0].clone() * x[1].clone() * x[3].clone() * 0.5;
        let mut out = x.to_vec();
        out.push(h);
        out
    }
}
