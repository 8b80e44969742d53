//! Moebius invariants of an umbilic-free immersion.
//!
//! Everything is derived from a degree-4 Taylor expansion of the chart map.
//! The normal projector, second fundamental form, mean curvature and `rho`
//! are carried as Taylor polynomials, so `Hess* rho`, `∇^⊥ H` and `dω` come
//! out of exact chain-rule propagation; frames are only fixed at the point.

mod curvature;
mod identities;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chart::{evaluate_jet, ImmersionChart, Jet};
use crate::error::{GeomError, Result};
use crate::fundamental::{fundamental_data, FundamentalData, EPS_UMBILIC};
use crate::linalg::{orthonormal_coordinate_frame, spd_inverse, taylor_inverse, values};
use crate::riemann::{christoffel, Tensor4};
use crate::taylor::{dot, Scalar, Taylor};

pub use curvature::{
    conformal_gauss_residual, kulkarni_flatness_residual, product_conformal_flatness,
    ricci_equation_residual, star_curvature_via_conformal_change, star_curvature_via_fd,
    RicciEquationReport, StarCurvature,
};
pub use identities::{
    moebius_form_closedness, moebius_lift_metric_check, ClosednessReport, MinkowskiVector,
    MoebiusLift,
};
pub(crate) use curvature::{conformal_gauss_residual_of, kulkarni_residual_of, ricci_equation_of};
pub(crate) use identities::ClosednessParts;

/// Jet order the Moebius pipeline consumes.
pub const PIPELINE_ORDER: usize = 4;

/// Pointwise Moebius package in chart coordinates, plus everything the
/// residual checks need.
#[derive(Debug, Clone)]
pub struct MoebiusState {
    pub n: usize,
    pub m: usize,
    pub x: Vec<f64>,
    pub position: DVector<f64>,
    pub fundamental: FundamentalData,
    pub rho: f64,
    /// `∂_i rho`.
    pub drho: DVector<f64>,
    /// `∂_i ∂_j rho`.
    pub d2rho: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `∂_k g`, one matrix per `k`.
    pub dg: Vec<DMatrix<f64>>,
    pub gstar: DMatrix<f64>,
    pub gstar_inv: DMatrix<f64>,
    /// Christoffel symbols of `g*`, indexed `[k][(i,j)]`.
    pub christoffel_star: Vec<DMatrix<f64>>,
    pub hess_star_rho: DMatrix<f64>,
    /// Mean curvature vector (ambient).
    pub mean_curvature: DVector<f64>,
    /// `α(∂_i, ∂_j)` (ambient).
    pub alpha: Vec<Vec<DVector<f64>>>,
    /// `β(∂_i, ∂_j)` (ambient).
    pub beta: Vec<Vec<DVector<f64>>>,
    /// Orthogonal projector onto the normal space and its derivatives.
    pub projector: DMatrix<f64>,
    pub dprojector: Vec<DMatrix<f64>>,
    /// `∂_i H` (ambient, not projected).
    pub dmean: Vec<DVector<f64>>,
    /// `ω(∂_i)` (ambient normal vectors).
    pub omega: Vec<DVector<f64>>,
    /// `dω(∂_i, ∂_j)` (ambient normal vectors).
    pub d_omega: Vec<Vec<DVector<f64>>>,
}

impl MoebiusState {
    pub fn at(chart: &ImmersionChart, x: &[f64]) -> Result<Self> {
        Self::at_with(chart, x, EPS_UMBILIC)
    }

    pub fn at_with(chart: &ImmersionChart, x: &[f64], eps_umbilic: f64) -> Result<Self> {
        let jet = evaluate_jet(chart, x, PIPELINE_ORDER)?;
        Self::from_jet(&jet, x, eps_umbilic)
    }

    pub fn from_jet(jet: &Jet, x: &[f64], eps_umbilic: f64) -> Result<Self> {
        let comps = jet.components();
        let n = jet.intrinsic_dim();
        let m = jet.ambient_dim();
        if jet.order() < PIPELINE_ORDER {
            return Err(GeomError::SpecInvalid(format!(
                "Moebius pipeline needs order-{PIPELINE_ORDER} jets, got order {}",
                jet.order()
            )));
        }
        if n < 2 {
            return Err(GeomError::DimensionTooSmall {
                op: "Moebius invariants",
                min: 2,
                n,
            });
        }
        let nf = n as f64;

        // first and second derivatives of f
        let fd1: Vec<Vec<Taylor>> = (0..n)
            .map(|i| comps.iter().map(|c| c.derivative(i)).collect())
            .collect();
        let mut fd2: Vec<Vec<Vec<Taylor>>> = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v: Vec<Taylor> = fd1[i].iter().map(|c| c.derivative(j)).collect();
                if i != j {
                    fd2[j][i] = v.clone();
                }
                fd2[i][j] = v;
            }
        }

        let g_t: Vec<Vec<Taylor>> = (0..n)
            .map(|i| (0..n).map(|j| dot(&fd1[i], &fd1[j])).collect())
            .collect();
        let ginv_t = taylor_inverse(&g_t)?;
        // q_i = g^{ij} ∂_j f, the dual tangent basis
        let q_t: Vec<Vec<Taylor>> = (0..n)
            .map(|i| {
                (0..m)
                    .map(|a| crate::taylor::sum((0..n).map(|j| &ginv_t[i][j] * &fd1[j][a])))
                    .collect()
            })
            .collect();
        let proj_t: Vec<Vec<Taylor>> = (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| {
                        let t = crate::taylor::sum((0..n).map(|i| &fd1[i][a] * &q_t[i][b]));
                        let t = -t;
                        if a == b {
                            t + 1.0
                        } else {
                            t
                        }
                    })
                    .collect()
            })
            .collect();

        // α_ij = ∂_i∂_j f - Σ_k ∂_k f <q_k, ∂_i∂_j f>
        let mut alpha_t: Vec<Vec<Vec<Taylor>>> = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in i..n {
                let coef: Vec<Taylor> = (0..n).map(|k| dot(&q_t[k], &fd2[i][j])).collect();
                let v: Vec<Taylor> = (0..m)
                    .map(|a| {
                        let corr = crate::taylor::sum((0..n).map(|k| &fd1[k][a] * &coef[k]));
                        &fd2[i][j][a] - &corr
                    })
                    .collect();
                if i != j {
                    alpha_t[j][i] = v.clone();
                }
                alpha_t[i][j] = v;
            }
        }

        let mean_t: Vec<Taylor> = (0..m)
            .map(|a| {
                crate::taylor::sum(
                    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| &ginv_t[i][j] * &alpha_t[i][j][a]),
                ) / nf
            })
            .collect();
        // α with the first index raised
        let raised: Vec<Vec<Vec<Taylor>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..m)
                            .map(|a| crate::taylor::sum((0..n).map(|k| &ginv_t[i][k] * &alpha_t[k][j][a])))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let alpha_sq = crate::taylor::sum(
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| dot(&raised[i][j], &raised[j][i])),
        );
        let h_sq = dot(&mean_t, &mean_t);
        let rho_sq_t = (alpha_sq - h_sq * nf) * (nf / (nf - 1.0));
        if rho_sq_t.value() <= eps_umbilic {
            return Err(GeomError::UmbilicPoint {
                rho_sq: rho_sq_t.value().max(0.0),
                eps: eps_umbilic,
            });
        }
        let rho_t = rho_sq_t.sqrt();

        let beta_t: Vec<Vec<Vec<Taylor>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..m)
                            .map(|a| &rho_t * &(&alpha_t[i][j][a] - &(&g_t[i][j] * &mean_t[a])))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let rho_sq_inv = rho_sq_t.recip();
        let gstar_inv_t: Vec<Vec<Taylor>> = (0..n)
            .map(|i| (0..n).map(|j| &ginv_t[i][j] * &rho_sq_inv).collect())
            .collect();
        let drho_t: Vec<Taylor> = (0..n).map(|k| rho_t.derivative(k)).collect();
        let grad_t: Vec<Taylor> = (0..n)
            .map(|k| crate::taylor::sum((0..n).map(|l| &gstar_inv_t[k][l] * &drho_t[l])))
            .collect();
        let dmean_t: Vec<Vec<Taylor>> = (0..n)
            .map(|i| mean_t.iter().map(|h| h.derivative(i)).collect())
            .collect();
        let inv_rho = rho_t.recip();
        // ω_i = -(1/ρ)(P ∂_i H + Σ_k β_ik (grad* ρ)^k)
        let omega_t: Vec<Vec<Taylor>> = (0..n)
            .map(|i| {
                (0..m)
                    .map(|a| {
                        let normal_dh = crate::taylor::sum((0..m).map(|b| &proj_t[a][b] * &dmean_t[i][b]));
                        let bgrad = crate::taylor::sum((0..n).map(|k| &beta_t[i][k][a] * &grad_t[k]));
                        -(&inv_rho * &(normal_dh + bgrad))
                    })
                    .collect()
            })
            .collect();

        // base-point values
        let vec_of = |v: &[Taylor]| DVector::from_iterator(v.len(), v.iter().map(|t| t.value()));
        let projector = values(&proj_t);
        let dprojector: Vec<DMatrix<f64>> = (0..n)
            .map(|k| DMatrix::from_fn(m, m, |a, b| proj_t[a][b].partial(&[k])))
            .collect();
        let omega: Vec<DVector<f64>> = omega_t.iter().map(|w| vec_of(w)).collect();
        let d_omega: Vec<Vec<DVector<f64>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let raw = DVector::from_iterator(
                            m,
                            (0..m).map(|a| omega_t[j][a].partial(&[i]) - omega_t[i][a].partial(&[j])),
                        );
                        &projector * raw
                    })
                    .collect()
            })
            .collect();

        let rho = rho_t.value();
        let drho = vec_of(&drho_t);
        let d2rho = DMatrix::from_vec(n, n, rho_t.hessian().into_iter().flatten().collect());
        let g = values(&g_t);
        let g_inv = spd_inverse(&g)?;
        let dg: Vec<DMatrix<f64>> = (0..n)
            .map(|k| DMatrix::from_fn(n, n, |i, j| g_t[i][j].partial(&[k])))
            .collect();
        let gstar = &g * (rho * rho);
        let gstar_inv = &g_inv / (rho * rho);
        let dgstar: Vec<DMatrix<f64>> = (0..n)
            .map(|k| &g * (2.0 * rho * drho[k]) + &dg[k] * (rho * rho))
            .collect();
        let christoffel_star = christoffel(&gstar_inv, &dgstar);
        let hess_star_rho = DMatrix::from_fn(n, n, |i, j| {
            d2rho[(i, j)] - (0..n).map(|k| christoffel_star[k][(i, j)] * drho[k]).sum::<f64>()
        });

        let fundamental = fundamental_data(jet, n)?;
        Ok(MoebiusState {
            n,
            m,
            x: x.to_vec(),
            position: DVector::from_iterator(m, comps.iter().map(|c| c.value())),
            fundamental,
            rho,
            drho,
            d2rho,
            g,
            g_inv,
            dg,
            gstar,
            gstar_inv,
            christoffel_star,
            hess_star_rho,
            mean_curvature: vec_of(&mean_t),
            alpha: alpha_t.iter().map(|r| r.iter().map(|v| vec_of(v)).collect()).collect(),
            beta: beta_t.iter().map(|r| r.iter().map(|v| vec_of(v)).collect()).collect(),
            projector,
            dprojector,
            dmean: dmean_t.iter().map(|v| vec_of(v)).collect(),
            omega,
            d_omega,
        })
    }

    pub fn p(&self) -> usize {
        self.m - self.n
    }

    /// `grad* rho` in coordinates.
    pub fn grad_star_rho(&self) -> DVector<f64> {
        &self.gstar_inv * &self.drho
    }

    /// `g*`-orthonormal frame (columns are coordinate vectors).
    pub fn star_frame(&self) -> Result<DMatrix<f64>> {
        orthonormal_coordinate_frame(&self.gstar)
    }

    /// `β(X, Y)` for coordinate vectors `X, Y`.
    pub fn beta_on(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for i in 0..self.n {
            for j in 0..self.n {
                let c = x[i] * y[j];
                if c != 0.0 {
                    out.axpy(c, &self.beta[i][j], 1.0);
                }
            }
        }
        out
    }

    /// `β` components in the normal frame, `[ξ][(i,j)]`.
    pub fn beta_components(&self) -> Vec<DMatrix<f64>> {
        self.fundamental
            .normal_frame
            .iter()
            .map(|xi| DMatrix::from_fn(self.n, self.n, |i, j| self.beta[i][j].dot(xi)))
            .collect()
    }

    /// `tr_{g*} β` (ambient vector).
    pub fn beta_trace(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for i in 0..self.n {
            for j in 0..self.n {
                out.axpy(self.gstar_inv[(i, j)], &self.beta[i][j], 1.0);
            }
        }
        out
    }

    /// `|β|^2_*`.
    pub fn beta_norm_sq(&self) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let w = self.gstar_inv[(i, k)] * self.gstar_inv[(j, l)];
                        if w != 0.0 {
                            acc += w * self.beta[i][j].dot(&self.beta[k][l]);
                        }
                    }
                }
            }
        }
        acc
    }

    /// `III_β(∂_i, ∂_j) = g*^{kl} <β_ik, β_jl>`.
    pub fn third_form(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| {
            let mut acc = 0.0;
            for k in 0..n {
                for l in 0..n {
                    acc += self.gstar_inv[(k, l)] * self.beta[i][k].dot(&self.beta[j][l]);
                }
            }
            acc
        })
    }

    /// Blaschke tensor from its defining formula.
    pub fn blaschke_direct(&self) -> DMatrix<f64> {
        let rho = self.rho;
        let grad_sq = self.drho.dot(&(&self.gstar_inv * &self.drho));
        let h_sq = self.mean_curvature.norm_squared();
        let coef = (grad_sq + h_sq) / (2.0 * rho * rho);
        let n = self.n;
        let psi = DMatrix::from_fn(n, n, |i, j| {
            self.beta[i][j].dot(&self.mean_curvature) / rho + coef * self.gstar[(i, j)]
                - self.hess_star_rho[(i, j)] / rho
        });
        (&psi + psi.transpose()) * 0.5
    }

    /// Riemann tensor of the induced metric (Gauss equation), coordinates.
    pub fn riemann(&self) -> Tensor4 {
        let a = &self.alpha;
        Tensor4::from_fn(self.n, |i, j, k, l| a[i][l].dot(&a[j][k]) - a[i][k].dot(&a[j][l]))
    }

    /// Riemann tensor of `g*` from the conformal-change identity
    /// `R* = rho^2 (R - h ⊙ g)` with `φ = log rho` and
    /// `h = Hess φ - dφ ⊗ dφ + |dφ|^2 g / 2`.
    pub fn riemann_star(&self) -> Tensor4 {
        let n = self.n;
        let rho = self.rho;
        let dphi = &self.drho / rho;
        let gamma = christoffel(&self.g_inv, &self.dg);
        let hess_phi = DMatrix::from_fn(n, n, |i, j| {
            let second = self.d2rho[(i, j)] / rho - dphi[i] * dphi[j];
            second - (0..n).map(|k| gamma[k][(i, j)] * dphi[k]).sum::<f64>()
        });
        let dphi_sq = dphi.dot(&(&self.g_inv * &dphi));
        let h = hess_phi - &dphi * dphi.transpose() + &self.g * (0.5 * dphi_sq);
        let h = (&h + h.transpose()) * 0.5;
        let khg = crate::riemann::kulkarni_nomizu(&h, &self.g);
        self.riemann().sub(&khg).scale(rho * rho)
    }

    pub fn ricci_star(&self) -> DMatrix<f64> {
        let ric = self.riemann_star().ricci(&self.gstar_inv);
        (&ric + ric.transpose()) * 0.5
    }

    /// Normalized scalar curvature `s* = tr Ric* / (n(n-1))`.
    pub fn scalar_star(&self) -> f64 {
        let ric = self.ricci_star();
        let n = self.n as f64;
        (&self.gstar_inv * ric).trace() / (n * (n - 1.0))
    }

    /// Blaschke tensor from `Ric*`, `III_β` and `s*`.
    pub fn blaschke_via_ric(&self) -> Result<DMatrix<f64>> {
        if self.n < 3 {
            return Err(GeomError::DimensionTooSmall {
                op: "Blaschke tensor via Ric*",
                min: 3,
                n: self.n,
            });
        }
        let n = self.n as f64;
        let ric = self.ricci_star();
        let s = (&self.gstar_inv * &ric).trace() / (n * (n - 1.0));
        let rhs = ric + self.third_form() - &self.gstar * ((n * n * s + 1.0) / (2.0 * n));
        Ok(rhs / (n - 2.0))
    }

    /// `tr_{g*} ψ` and its predicted value `(n^2 s* + 1)/(2n)`.
    pub fn blaschke_trace(&self) -> (f64, f64) {
        let n = self.n as f64;
        let tr = (&self.gstar_inv * self.blaschke_direct()).trace();
        (tr, (n * n * self.scalar_star() + 1.0) / (2.0 * n))
    }

    /// Moebius form components in the normal frame, `[(ξ, i)]`.
    pub fn moebius_form_components(&self) -> DMatrix<f64> {
        let nf = &self.fundamental.normal_frame;
        DMatrix::from_fn(nf.len(), self.n, |a, i| self.omega[i].dot(&nf[a]))
    }

    /// `g*`-eigenvalues of a symmetric form (eigenvalues of `g*^{-1} b`),
    /// sorted ascending.
    pub fn star_eigenvalues(&self, b: &DMatrix<f64>) -> Vec<f64> {
        let frame = self.star_frame().expect("g* is positive definite");
        let m = frame.transpose() * b * &frame;
        let mut ev: Vec<f64> = crate::linalg::symmetric_eigen(&m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn data(&self) -> Result<MoebiusData> {
        let r_star = self.riemann_star();
        let n = self.n;
        let mut sec = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut e = DVector::zeros(n);
                let mut f = DVector::zeros(n);
                e[i] = 1.0;
                f[j] = 1.0;
                sec.push(CoordinatePlane {
                    i,
                    j,
                    curvature: r_star.sectional(&self.gstar, &e, &f),
                });
            }
        }
        let ric = self.ricci_star();
        let nf = n as f64;
        Ok(MoebiusData {
            rho: self.rho,
            grad_rho_star: self.grad_star_rho().iter().copied().collect(),
            gstar: rows(&self.gstar),
            beta: self.beta_components().iter().map(rows).collect(),
            third_form: rows(&self.third_form()),
            blaschke: rows(&self.blaschke_direct()),
            moebius_form: rows(&self.moebius_form_components()),
            s_star: (&self.gstar_inv * &ric).trace() / (nf * (nf - 1.0)),
            ric_star: rows(&ric),
            sec_star: sec,
        })
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinatePlane {
    pub i: usize,
    pub j: usize,
    pub curvature: f64,
}

/// Serializable snapshot of the Moebius invariants at a point (coordinate
/// components; `beta` and `moebius_form` use the normal frame).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoebiusData {
    pub rho: f64,
    pub grad_rho_star: Vec<f64>,
    pub gstar: Vec<Vec<f64>>,
    pub beta: Vec<Vec<Vec<f64>>>,
    pub third_form: Vec<Vec<f64>>,
    pub blaschke: Vec<Vec<f64>>,
    pub moebius_form: Vec<Vec<f64>>,
    pub ric_star: Vec<Vec<f64>>,
    pub s_star: f64,
    pub sec_star: Vec<CoordinatePlane>,
}

pub fn moebius_data(chart: &ImmersionChart, x: &[f64]) -> Result<MoebiusData> {
    MoebiusState::at(chart, x)?.data()
}

/// `g* = rho^2 g` in coordinates.
pub fn moebius_metric(chart: &ImmersionChart, x: &[f64]) -> Result<DMatrix<f64>> {
    let jet = evaluate_jet(chart, x, 2)?;
    let fd = fundamental_data(&jet, chart.intrinsic_dim)?;
    let r2 = crate::fundamental::require_non_umbilic(&fd, EPS_UMBILIC)?;
    Ok(&fd.g * r2)
}

/// `β` components in the normal frame.
pub fn moebius_second_fundamental_form(chart: &ImmersionChart, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    Ok(MoebiusState::at(chart, x)?.beta_components())
}

pub fn blaschke_tensor_direct(chart: &ImmersionChart, x: &[f64]) -> Result<DMatrix<f64>> {
    Ok(MoebiusState::at(chart, x)?.blaschke_direct())
}

pub fn blaschke_tensor_via_ric(chart: &ImmersionChart, x: &[f64]) -> Result<DMatrix<f64>> {
    MoebiusState::at(chart, x)?.blaschke_via_ric()
}

/// Moebius form components `[(ξ, i)]` in the normal frame.
pub fn moebius_form(chart: &ImmersionChart, x: &[f64]) -> Result<DMatrix<f64>> {
    Ok(MoebiusState::at(chart, x)?.moebius_form_components())
}

/// Metric `g*` at a point from an order-2 jet; shared by the sampled-metric
/// curvature oracle.
pub(crate) fn gstar_from_jet(jet: &Jet, eps: f64) -> Result<DMatrix<f64>> {
    let fd = fundamental_data(jet, jet.intrinsic_dim())?;
    let r2 = crate::fundamental::require_non_umbilic(&fd, eps)?;
    Ok(&fd.g * r2)
}

#[cfg(test)]
mod tests;
