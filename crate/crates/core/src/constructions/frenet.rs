//! Curves of prescribed first curvature in a 2-dimensional space form.
//!
//! The frame `(γ, T, N)` lives in `R^3` (Euclidean for the plane and the
//! sphere, Lorentzian for the hyperboloid) and obeys
//! `γ' = T, T' = κN - c̃γ, N' = -κT`. Knot states are integrated once with an
//! 8th-order embedded scheme and projected back onto the quadric; any other
//! arclength is reached by a short integration from the nearest knot, so a
//! query never depends on earlier queries.

use nalgebra::{SVector, Vector3};
use ode_solvers::dop_shared::{IntegrationError, OutputType};
use ode_solvers::{Dop853, System};
use serde::{Deserialize, Serialize};

use super::kappa::Kappa;
use crate::error::{GeomError, Result};

// Frame components followed by arclength; the solver steps in a local
// parameter so the system it sees is autonomous.
type State = SVector<f64, 10>;

const KNOT_SPACING: f64 = 0.05;
const RTOL: f64 = 1e-12;
const ATOL: f64 = 1e-13;

/// Position and unit tangent/normal at the reference arclength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialFrame {
    pub s0: f64,
    pub position: [f64; 3],
    pub tangent: [f64; 3],
    pub normal: [f64; 3],
}

impl InitialFrame {
    /// Canonical frame: origin/`e_1`/`e_2` in the plane, `e_1`/`e_2`/`e_3` on
    /// the sphere, `(1,0,0)`/`e_1`/`e_2` on the hyperboloid.
    pub fn canonical(ambient_curvature: i8, s0: f64) -> Self {
        let (position, tangent, normal) = match ambient_curvature {
            0 => ([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
            1 => ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]),
            _ => ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]),
        };
        InitialFrame { s0, position, tangent, normal }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    /// 0 (plane), 1 (unit sphere) or -1 (hyperboloid).
    pub ambient_curvature: i8,
    pub kappa: Kappa,
    /// Closed arclength interval the curve is built on.
    pub domain: (f64, f64),
    pub initial: InitialFrame,
}

impl CurveSpec {
    /// Canonical frame at the midpoint of the domain.
    pub fn new(ambient_curvature: i8, kappa: Kappa, domain: (f64, f64)) -> Self {
        let s0 = 0.5 * (domain.0 + domain.1);
        CurveSpec {
            ambient_curvature,
            kappa,
            domain,
            initial: InitialFrame::canonical(ambient_curvature, s0),
        }
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = self.domain;
        let (lo, hi) = self.kappa.admissible();
        if !(a < b) || a <= lo || b >= hi {
            return Err(GeomError::SpecInvalid(format!(
                "curve domain [{a}, {b}] must be a non-empty subinterval of ({lo}, {hi})"
            )));
        }
        if !(-1..=1).contains(&self.ambient_curvature) {
            return Err(GeomError::SpecInvalid(format!(
                "ambient curvature {} must be 0, 1 or -1",
                self.ambient_curvature
            )));
        }
        let s0 = self.initial.s0;
        if !(a..=b).contains(&s0) {
            return Err(GeomError::SpecInvalid(format!("initial arclength {s0} outside [{a}, {b}]")));
        }
        Ok(())
    }
}

/// `γ` and its first four arclength derivatives.
pub type CurveJets = [Vector3<f64>; 5];

struct FrenetSystem {
    kappa: Kappa,
    ct: f64,
}

impl System<f64, State> for FrenetSystem {
    fn system(&self, _tau: f64, y: &State, dy: &mut State) {
        let k = self.kappa.value(y[9]);
        for i in 0..3 {
            let (g, t, n) = (y[i], y[3 + i], y[6 + i]);
            dy[i] = t;
            dy[3 + i] = k * n - self.ct * g;
            dy[6 + i] = -k * t;
        }
        dy[9] = 1.0;
    }
}

#[derive(Debug, Clone)]
pub struct FrenetCurve {
    spec: CurveSpec,
    knots: Vec<(f64, State)>,
}

impl FrenetCurve {
    pub fn new(spec: CurveSpec) -> Result<Self> {
        spec.validate()?;
        let init = &spec.initial;
        let mut y0 = State::zeros();
        for i in 0..3 {
            y0[i] = init.position[i];
            y0[3 + i] = init.tangent[i];
            y0[6 + i] = init.normal[i];
        }
        let mut curve = FrenetCurve { spec, knots: Vec::new() };
        let y0 = curve.project(y0);
        let (a, b) = spec.domain;
        let s0 = init.s0;

        let mut forward = vec![(s0, y0)];
        let mut s = s0;
        let mut y = y0;
        while s < b {
            let next = (s + KNOT_SPACING).min(b);
            y = curve.integrate(s, next, y)?;
            s = next;
            forward.push((s, y));
        }
        let mut backward = Vec::new();
        let (mut s, mut y) = (s0, y0);
        while s > a {
            let next = (s - KNOT_SPACING).max(a);
            y = curve.integrate(s, next, y)?;
            s = next;
            backward.push((s, y));
        }
        backward.reverse();
        backward.extend(forward);
        curve.knots = backward;
        Ok(curve)
    }

    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    fn inner(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
        if self.spec.ambient_curvature < 0 {
            -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
        } else {
            a.dot(b)
        }
    }

    /// Restores the quadric constraint and orthonormality of the frame.
    fn project(&self, y: State) -> State {
        let ct = f64::from(self.spec.ambient_curvature);
        let mut g = Vector3::new(y[0], y[1], y[2]);
        let mut t = Vector3::new(y[3], y[4], y[5]);
        let mut n = Vector3::new(y[6], y[7], y[8]);
        if ct != 0.0 {
            // <γ,γ> = 1/c̃ on both quadrics
            g /= (self.inner(&g, &g) * ct).sqrt();
            t -= g * (self.inner(&t, &g) * ct);
            n -= g * (self.inner(&n, &g) * ct);
        } else {
            g[2] = 0.0;
            t[2] = 0.0;
            n[2] = 0.0;
        }
        t /= self.inner(&t, &t).sqrt();
        n -= t * self.inner(&n, &t);
        n /= self.inner(&n, &n).sqrt();
        let mut out = State::zeros();
        out[9] = y[9];
        for i in 0..3 {
            out[i] = g[i];
            out[3 + i] = t[i];
            out[6 + i] = n[i];
        }
        out
    }

    fn integrate(&self, from: f64, to: f64, y: State) -> Result<State> {
        if from == to {
            return Ok(y);
        }
        let system = FrenetSystem {
            kappa: self.spec.kappa,
            ct: f64::from(self.spec.ambient_curvature),
        };
        let span = to - from;
        let mut y = y;
        y[9] = from;
        let mut stepper = Dop853::from_param(
            system,
            0.0,
            span,
            span,
            y,
            RTOL,
            ATOL,
            0.9,
            0.0,
            0.333,
            6.0,
            span.abs(),
            0.0,
            100_000,
            1000,
            OutputType::Sparse,
        );
        let fail = |reason: String| GeomError::IntegrationFailure { s: to, reason };
        match stepper.integrate() {
            Ok(_) => {}
            // roundoff can leave a sliver before the endpoint
            Err(IntegrationError::StepSizeUnderflow { x }) if (x - span).abs() <= 1e-12 * span.abs() => {}
            Err(e) => return Err(fail(e.to_string())),
        }
        let mut last = *stepper.y_out().last().ok_or_else(|| fail("no output".into()))?;
        let remaining = to - last[9];
        if remaining != 0.0 {
            // first-order touch-up over at most a few ulps
            let mut dy = State::zeros();
            FrenetSystem { kappa: self.spec.kappa, ct: f64::from(self.spec.ambient_curvature) }.system(0.0, &last, &mut dy);
            last += dy * remaining;
        }
        last[9] = to;
        Ok(self.project(last))
    }

    fn state(&self, s: f64) -> Result<State> {
        let (a, b) = self.spec.domain;
        if !(a..=b).contains(&s) {
            return Err(GeomError::DomainViolation {
                coords: vec![s],
                reason: format!("arclength outside [{a}, {b}]"),
            });
        }
        let idx = self.knots.partition_point(|(k, _)| *k < s);
        let nearest = [idx.saturating_sub(1), idx.min(self.knots.len() - 1)]
            .into_iter()
            .min_by(|&i, &j| (self.knots[i].0 - s).abs().total_cmp(&(self.knots[j].0 - s).abs()))
            .expect("knots are non-empty");
        let (k, y) = self.knots[nearest];
        self.integrate(k, s, y)
    }

    /// Frame `(γ, T, N)` at arclength `s`.
    pub fn frame(&self, s: f64) -> Result<[Vector3<f64>; 3]> {
        let y = self.state(s)?;
        Ok([
            Vector3::new(y[0], y[1], y[2]),
            Vector3::new(y[3], y[4], y[5]),
            Vector3::new(y[6], y[7], y[8]),
        ])
    }

    /// `γ, γ', ..., γ''''` at `s` from the Frenet equations evaluated on the
    /// integrated frame.
    pub fn jets(&self, s: f64) -> Result<CurveJets> {
        let [g, t, n] = self.frame(s)?;
        let ct = f64::from(self.spec.ambient_curvature);
        let [k, k1, k2] = self.spec.kappa.derivatives(s);
        let d2 = n * k - g * ct;
        let d3 = n * k1 - t * (k * k + ct);
        let d4 = n * (k2 - k * (k * k + ct)) - t * (3.0 * k * k1) + g * (ct * (k * k + ct));
        Ok([g, t, d2, d3, d4])
    }
}

/// Position and jets of the curve described by `spec` at arclength `s`.
pub fn frenet_curve(spec: &CurveSpec, s: f64) -> Result<CurveJets> {
    FrenetCurve::new(*spec)?.jets(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::kappa::{spiral_kappa, SpiralCase};
    use std::f64::consts::PI;

    #[test]
    fn circle_closes() {
        let r = 2.0;
        let spec = CurveSpec {
            initial: InitialFrame::canonical(0, 0.0),
            ..CurveSpec::new(0, Kappa::Constant { value: 1.0 / r }, (0.0, 2.0 * PI * r))
        };
        let curve = FrenetCurve::new(spec).unwrap();
        let start = curve.jets(0.0).unwrap()[0];
        let end = curve.jets(2.0 * PI * r).unwrap()[0];
        assert!((end - start).norm() < 1e-8, "{}", (end - start).norm());
    }

    #[test]
    fn sphere_geodesic_stays_on_sphere() {
        let curve = FrenetCurve::new(CurveSpec::new(1, Kappa::Constant { value: 0.0 }, (0.0, 6.0))).unwrap();
        for s in [0.0, 0.7, 2.9, 4.4, 6.0] {
            let g = curve.jets(s).unwrap()[0];
            assert!((g.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperboloid_curve_keeps_constraint() {
        let k = spiral_kappa(SpiralCase::HypCpos, 4.0, 0.0).unwrap();
        let curve = FrenetCurve::new(CurveSpec::new(-1, k, (-1.5, 1.5))).unwrap();
        for s in [-1.5, -0.3, 0.0, 0.9, 1.5] {
            let [g, t, n] = curve.frame(s).unwrap();
            assert!((curve.inner(&g, &g) + 1.0).abs() < 1e-12);
            assert!(curve.inner(&g, &t).abs() < 1e-12);
            assert!(curve.inner(&t, &n).abs() < 1e-12);
            assert!(g[0] > 0.0);
        }
    }

    #[test]
    fn queries_do_not_depend_on_history() {
        let k = spiral_kappa(SpiralCase::FlatCneg, -1.0, 0.0).unwrap();
        let curve = FrenetCurve::new(CurveSpec::new(0, k, (0.5, 3.0))).unwrap();
        let a = curve.jets(1.234).unwrap();
        let _ = curve.jets(2.9).unwrap();
        let b = curve.jets(1.234).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn outside_domain_is_rejected() {
        let k = spiral_kappa(SpiralCase::FlatCneg, -1.0, 0.0).unwrap();
        assert!(FrenetCurve::new(CurveSpec::new(0, k, (-0.5, 3.0))).is_err());
        let curve = FrenetCurve::new(CurveSpec::new(0, k, (0.5, 3.0))).unwrap();
        assert!(matches!(curve.jets(3.5), Err(GeomError::DomainViolation { .. })));
    }
}
