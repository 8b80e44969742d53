//! Moebius lift into the light cone and the closedness of the Moebius form.

use nalgebra::{DMatrix, DVector};

use super::MoebiusState;
use crate::chart::ImmersionChart;
use crate::error::Result;

/// Vector of `R^{m+2}_1` with the Lorentzian product
/// `<x, y> = -x_0 y_0 + x_1 y_1 + ... + x_{m+1} y_{m+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiVector(pub DVector<f64>);

impl MinkowskiVector {
    pub fn inner(&self, o: &MinkowskiVector) -> f64 {
        -self.0[0] * o.0[0] + self.0.rows(1, self.0.len() - 1).dot(&o.0.rows(1, o.0.len() - 1))
    }

    /// `p0 = (-1/2, 1/2, 0, ...)`; lightlike with `<p0, w> = 1`.
    pub fn p0(m: usize) -> Self {
        let mut v = DVector::zeros(m + 2);
        v[0] = -0.5;
        v[1] = 0.5;
        MinkowskiVector(v)
    }

    /// `w = (1, 1, 0, ...)`.
    pub fn w(m: usize) -> Self {
        let mut v = DVector::zeros(m + 2);
        v[0] = 1.0;
        v[1] = 1.0;
        MinkowskiVector(v)
    }

    /// Isometric embedding `C: R^m -> <p0, w>^⊥`.
    pub fn embed(x: &DVector<f64>) -> Self {
        let mut v = DVector::zeros(x.len() + 2);
        v.rows_mut(2, x.len()).copy_from(x);
        MinkowskiVector(v)
    }
}

/// Lift `Y = rho (p0 + C f - |f|^2 w / 2)` and its coordinate derivatives.
#[derive(Debug, Clone)]
pub struct MoebiusLift {
    pub position: MinkowskiVector,
    pub derivatives: Vec<MinkowskiVector>,
}

impl MoebiusLift {
    pub fn of(st: &MoebiusState) -> Self {
        let m = st.m;
        let f = &st.position;
        let p0 = MinkowskiVector::p0(m).0;
        let w = MinkowskiVector::w(m).0;
        let psi = &p0 + MinkowskiVector::embed(f).0 - &w * (0.5 * f.norm_squared());
        let derivatives = (0..st.n)
            .map(|i| {
                let fi = &st.fundamental.coordinate_tangents[i];
                let dpsi = MinkowskiVector::embed(fi).0 - &w * f.dot(fi);
                MinkowskiVector(&psi * st.drho[i] + dpsi * st.rho)
            })
            .collect();
        MoebiusLift {
            position: MinkowskiVector(psi * st.rho),
            derivatives,
        }
    }

    pub fn metric(&self) -> DMatrix<f64> {
        let d = &self.derivatives;
        DMatrix::from_fn(d.len(), d.len(), |i, j| d[i].inner(&d[j]))
    }
}

/// `max |<dY_i, dY_j> - g*_ij|` together with `|<Y, Y>|`, both relative to
/// `max(1, |g*|)` and `max(1, rho^2 |f|^2)` respectively.
pub fn moebius_lift_metric_check(chart: &ImmersionChart, x: &[f64]) -> Result<(f64, f64)> {
    let st = MoebiusState::at(chart, x)?;
    let lift = MoebiusLift::of(&st);
    let scale = st.gstar.amax().max(1.0);
    let metric = (lift.metric() - &st.gstar).amax() / scale;
    let yy = lift.position.inner(&lift.position).abs();
    let yscale = (st.rho * st.rho * st.position.norm_squared()).max(1.0);
    Ok((metric, yy / yscale))
}

/// Residuals around `dω`, all taken over a `g*`-orthonormal frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosednessReport {
    /// Largest `|dω(X,Y)|` from the Taylor pipeline.
    pub exact: f64,
    /// Largest `|dω(X,Y)|` from central differences of `ω`.
    pub finite_difference: f64,
    /// Largest difference between the two.
    pub agreement: f64,
    /// Largest `|dω(X,Y) - [β(Y, ψ̂X) - β(X, ψ̂Y)]|` with `ψ̂ = g*^{-1} ψ`.
    pub ricci_identity: f64,
}

/// Exterior derivative of the Moebius form by central differences of `ω`
/// with one Richardson level, projected to the normal space at `x`.
pub fn moebius_form_exterior_derivative_fd(chart: &ImmersionChart, x: &[f64], step: f64) -> Result<Vec<Vec<DVector<f64>>>> {
    let n = chart.intrinsic_dim;
    chart.domain.check(x, chart.margin(super::PIPELINE_ORDER) + step)?;
    let base = MoebiusState::at(chart, x)?;
    // ω at x ± h e_i for h = step and step/2
    let shifted = |i: usize, h: f64| -> Result<Vec<DVector<f64>>> {
        let mut y = x.to_vec();
        y[i] += h;
        Ok(MoebiusState::at(chart, &y)?.omega)
    };
    let mut diff = vec![vec![Vec::new(); n]; n];
    for h in [step, 0.5 * step] {
        for i in 0..n {
            let plus = shifted(i, h)?;
            let minus = shifted(i, -h)?;
            for j in 0..n {
                diff[i][j].push((&plus[j] - &minus[j]) / (2.0 * h));
            }
        }
    }
    // Richardson: (4 D(h/2) - D(h)) / 3
    let d = |i: usize, j: usize| (&diff[i][j][1] * 4.0 - &diff[i][j][0]) / 3.0;
    Ok((0..n)
        .map(|i| (0..n).map(|j| &base.projector * (d(i, j) - d(j, i))).collect())
        .collect())
}

pub fn moebius_form_closedness(chart: &ImmersionChart, x: &[f64], fd_step: f64) -> Result<ClosednessReport> {
    let st = MoebiusState::at(chart, x)?;
    let fd = moebius_form_exterior_derivative_fd(chart, x, fd_step)?;
    let parts = ClosednessParts::of(&st)?;
    Ok(ClosednessReport {
        exact: parts.exact,
        finite_difference: parts.in_frame(&|i, j| fd[i][j].clone()),
        agreement: parts.in_frame(&|i, j| &st.d_omega[i][j] - &fd[i][j]),
        ricci_identity: parts.ricci_identity,
    })
}

/// The finite-difference-free part of [`ClosednessReport`].
pub(crate) struct ClosednessParts {
    frame: DMatrix<f64>,
    n: usize,
    m: usize,
    pub exact: f64,
    pub ricci_identity: f64,
}

impl ClosednessParts {
    pub(crate) fn of(st: &MoebiusState) -> Result<Self> {
        let n = st.n;
        let psi_hat = &st.gstar_inv * st.blaschke_direct();
        let unit = |i: usize| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
        let rhs: Vec<Vec<DVector<f64>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let pi = psi_hat.column(i).into_owned();
                        let pj = psi_hat.column(j).into_owned();
                        st.beta_on(&unit(j), &pi) - st.beta_on(&unit(i), &pj)
                    })
                    .collect()
            })
            .collect();
        let mut parts = ClosednessParts {
            frame: st.star_frame()?,
            n,
            m: st.m,
            exact: 0.0,
            ricci_identity: 0.0,
        };
        parts.exact = parts.in_frame(&|i, j| st.d_omega[i][j].clone());
        parts.ricci_identity = parts.in_frame(&|i, j| &st.d_omega[i][j] - &rhs[i][j]);
        Ok(parts)
    }

    /// Largest norm of a vector-valued 2-form over the `g*`-orthonormal frame.
    fn in_frame(&self, t: &dyn Fn(usize, usize) -> DVector<f64>) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let mut acc = DVector::zeros(self.m);
                for i in 0..n {
                    for j in 0..n {
                        let c = self.frame[(i, a)] * self.frame[(j, b)];
                        if c != 0.0 {
                            acc.axpy(c, &t(i, j), 1.0);
                        }
                    }
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}
