//! Prescribed first-curvature functions.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::taylor::{Scalar, Taylor};

/// The six curvature spirals whose cylinders, cones or rotational
/// submanifolds have constant Moebius curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpiralCase {
    FlatC0,
    FlatCneg,
    SphereCneg,
    HypCpos,
    HypCneg,
    HypC0,
}

impl SpiralCase {
    pub const ALL: [SpiralCase; 6] = [
        SpiralCase::FlatC0,
        SpiralCase::FlatCneg,
        SpiralCase::SphereCneg,
        SpiralCase::HypCpos,
        SpiralCase::HypCneg,
        SpiralCase::HypC0,
    ];

    /// Curvature of the space form the curve lives in.
    pub fn ambient_curvature(self) -> i8 {
        match self {
            SpiralCase::FlatC0 | SpiralCase::FlatCneg => 0,
            SpiralCase::SphereCneg => 1,
            SpiralCase::HypCpos | SpiralCase::HypCneg | SpiralCase::HypC0 => -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SpiralCase::FlatC0 => "flat_c0",
            SpiralCase::FlatCneg => "flat_cneg",
            SpiralCase::SphereCneg => "sphere_cneg",
            SpiralCase::HypCpos => "hyp_cpos",
            SpiralCase::HypCneg => "hyp_cneg",
            SpiralCase::HypC0 => "hyp_c0",
        }
    }
}

/// First curvature as a function of arclength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Kappa {
    Constant { value: f64 },
    Spiral { case: SpiralCase, c: f64, r: f64 },
    /// `sqrt(-1/(c x^2) - r^2)` on `0 < |x| < 1/(r sqrt(-c))`.
    ProductFactor { c: f64, r: f64 },
}

impl Kappa {
    pub fn eval<S: Scalar>(&self, s: &S) -> S {
        match *self {
            Kappa::Constant { value } => s.lift(value),
            Kappa::Spiral { case, c, r } => match case {
                SpiralCase::FlatC0 => s.lift(1.0 / r),
                SpiralCase::FlatCneg => (s.clone() * (-c).sqrt()).recip(),
                SpiralCase::SphereCneg => (s.sin() * (-c).sqrt()).recip(),
                SpiralCase::HypCpos => (s.cosh() * c.sqrt()).recip(),
                SpiralCase::HypCneg => (s.sinh() * (-c).sqrt()).recip(),
                SpiralCase::HypC0 => s.exp(),
            },
            Kappa::ProductFactor { c, r } => {
                let inv = (s.clone() * s.clone() * c).recip();
                (-inv - r * r).sqrt()
            }
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.eval(&s)
    }

    /// `[κ, κ', κ'']` at `s`.
    pub fn derivatives(&self, s: f64) -> [f64; 3] {
        let t = Taylor::variables(&[s], 2).remove(0);
        let k = self.eval(&t);
        [k.value(), k.partial(&[0]), k.partial(&[0, 0])]
    }

    /// Open interval of admissible arclength values.
    pub fn admissible(&self) -> (f64, f64) {
        match *self {
            Kappa::Constant { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Kappa::Spiral { case, .. } => match case {
                SpiralCase::FlatCneg | SpiralCase::HypCneg => (0.0, f64::INFINITY),
                SpiralCase::SphereCneg => (0.0, std::f64::consts::PI),
                _ => (f64::NEG_INFINITY, f64::INFINITY),
            },
            Kappa::ProductFactor { c, r } => (0.0, 1.0 / (r * (-c).sqrt())),
        }
    }
}

/// Curvature function for one of the spiral cases. `c` is the target Moebius
/// curvature; `r` is only read by `flat_c0`.
pub fn spiral_kappa(case: SpiralCase, c: f64, r: f64) -> Result<Kappa> {
    let bad = |name: &'static str, value: f64, range: &'static str| Err(GeomError::ParamOutOfRange { name, value, range });
    match case {
        SpiralCase::FlatC0 => {
            if c != 0.0 {
                return bad("c", c, "c = 0 for flat_c0");
            }
            if !(r > 0.0) {
                return bad("r", r, "r > 0");
            }
        }
        SpiralCase::FlatCneg | SpiralCase::SphereCneg | SpiralCase::HypCneg => {
            if !(c < 0.0) {
                return bad("c", c, "c < 0");
            }
        }
        SpiralCase::HypCpos => {
            if !(c > 0.0) {
                return bad("c", c, "c > 0");
            }
        }
        SpiralCase::HypC0 => {
            if c != 0.0 {
                return bad("c", c, "c = 0 for hyp_c0");
            }
        }
    }
    Ok(Kappa::Spiral { case, c, r })
}

/// Curvature of the non-circular factor of a product of plane curves with
/// constant Moebius curvature `c < 0`.
pub fn product_factor_kappa(c: f64, r: f64) -> Result<Kappa> {
    if !(c < 0.0) {
        return Err(GeomError::ParamOutOfRange { name: "c", value: c, range: "c < 0" });
    }
    if !(r > 0.0) {
        return Err(GeomError::ParamOutOfRange { name: "r", value: r, range: "r > 0" });
    }
    Ok(Kappa::ProductFactor { c, r })
}
