//! Evaluates the planned checks over the sample grid.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::Plan;
use super::registry::Check;
use super::report::{CheckVerdict, Environment, PointRow, Report, Verdict};
use super::ScenarioError;
use crate::chart::evaluate_jet;
use crate::error::GeomError;
use crate::moebius::{
    conformal_gauss_residual_of, ClosednessParts, kulkarni_residual_of, moebius_lift_metric_check, ricci_equation_of,
    star_curvature_via_fd, MoebiusState, StarCurvature,
};
use crate::normal::{
    dupin_residual, moebius_normal_decomposition, normal_bundle_flatness, principal_normals,
    sectional_vs_principal_normals, PrincipalNormalDecomposition, GROUPING_TOL,
};
use crate::sampling::point_rng;

/// Random planes per point for the K* range, on top of the coordinate planes.
pub const KSTAR_PLANES: usize = 10;
/// Per-order tolerances of the exact-vs-FD jet comparison.
pub const JET_TOLERANCES: [f64; 3] = [1e-7, 1e-5, 1e-4];
/// Step of the finite-difference metric used for `star_curvature_agreement`.
pub const METRIC_FD_STEP: f64 = 1e-3;
/// Step of the differences taken by the Dupin detector.
pub const DUPIN_STEP: f64 = 1e-3;

enum Outcome {
    Value(f64),
    Warned(f64, String),
    NotApplicable,
    Failed(String),
}

impl From<GeomError> for Outcome {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::DimensionTooSmall { .. } => Outcome::NotApplicable,
            other => Outcome::Failed(other.to_string()),
        }
    }
}

fn value(r: crate::error::Result<f64>) -> Outcome {
    match r {
        Ok(v) => Outcome::Value(v),
        Err(e) => e.into(),
    }
}

/// Runs `plan` on `jobs` worker threads. Rows come back in grid order and
/// each point draws from its own random stream, so the report does not
/// depend on `jobs`.
pub fn run(plan: &Plan, jobs: usize) -> Result<Report, ScenarioError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ScenarioError::Config(format!("worker pool: {e}")))?;
    let rows: Vec<PointRow> = pool.install(|| {
        plan.points
            .par_iter()
            .enumerate()
            .map(|(i, x)| evaluate_point(plan, i, x))
            .collect()
    });
    let verdicts = plan
        .checks
        .iter()
        .map(|&(check, tol)| verdict(check, tol, &rows))
        .collect();
    Ok(Report {
        scenario: plan.scenario.clone(),
        chart: plan.chart.label.clone(),
        environment: Environment {
            version: env!("CARGO_PKG_VERSION"),
            seed: plan.scenario.seed,
            grid_counts: plan.counts.clone(),
            points: plan.points.len(),
        },
        verdicts,
        rows,
        checks: plan.checks.iter().map(|(c, _)| *c).collect(),
    })
}

fn verdict(check: Check, tol: f64, rows: &[PointRow]) -> CheckVerdict {
    let name = check.name();
    let mut out = CheckVerdict {
        check: name,
        tolerance: tol,
        verdict: Verdict::Pass,
        max_residual: None,
        failures: 0,
        not_applicable: 0,
        warnings: 0,
    };
    for row in rows {
        if row.errors.contains_key(name) {
            out.failures += 1;
            continue;
        }
        if row.warnings.contains_key(name) {
            out.warnings += 1;
        }
        match row.residuals.get(name).copied().flatten() {
            Some(r) => {
                out.max_residual = Some(out.max_residual.map_or(r, |m: f64| m.max(r)));
                if !(r <= tol) {
                    out.failures += 1;
                }
            }
            None => out.not_applicable += 1,
        }
    }
    out.verdict = if out.failures > 0 {
        Verdict::Fail
    } else if out.not_applicable == rows.len() {
        Verdict::Skipped
    } else if out.warnings > 0 {
        Verdict::Warn
    } else {
        Verdict::Pass
    };
    out
}

/// Everything computed once per point and shared between checks.
struct PointContext<'a> {
    plan: &'a Plan,
    index: usize,
    x: &'a [f64],
    state: Result<MoebiusState, GeomError>,
    star: Option<StarCurvature>,
    normals: Option<Result<PrincipalNormalDecomposition, GeomError>>,
    closedness: Option<Result<(f64, f64), GeomError>>,
    rng: ChaCha8Rng,
}

fn evaluate_point(plan: &Plan, index: usize, x: &[f64]) -> PointRow {
    let mut ctx = PointContext {
        plan,
        index,
        x,
        state: MoebiusState::at(&plan.chart, x),
        star: None,
        normals: None,
        closedness: None,
        rng: point_rng(plan.scenario.seed, index),
    };
    let mut row = PointRow {
        point_index: index,
        point: x.to_vec(),
        s: plan.family.as_ref().and_then(|f| f.arclength(x)),
        rho: None,
        kstar_min: None,
        kstar_max: None,
        residuals: BTreeMap::new(),
        errors: BTreeMap::new(),
        warnings: BTreeMap::new(),
    };
    if let Ok(st) = &ctx.state {
        row.rho = Some(st.rho);
        let star = StarCurvature {
            riemann: st.riemann_star(),
            gstar: st.gstar.clone(),
        };
        let ks = star.sample_planes(&mut ctx.rng, KSTAR_PLANES);
        row.kstar_min = ks.iter().copied().reduce(f64::min);
        row.kstar_max = ks.iter().copied().reduce(f64::max);
        ctx.star = Some(star);
    }
    for &(check, _) in &plan.checks {
        let name = check.name();
        match ctx.evaluate(check) {
            Outcome::Value(v) => {
                row.residuals.insert(name, Some(v));
            }
            Outcome::Warned(v, msg) => {
                row.residuals.insert(name, Some(v));
                row.warnings.insert(name, msg);
            }
            Outcome::NotApplicable => {
                row.residuals.insert(name, None);
            }
            Outcome::Failed(msg) => {
                if let Some(GeomError::UmbilicPoint { .. }) = ctx.state.as_ref().err() {
                    row.residuals.insert(name, None);
                    row.warnings.insert(name, msg);
                } else {
                    row.residuals.insert(name, None);
                    row.errors.insert(name, msg);
                }
            }
        }
    }
    row
}

impl PointContext<'_> {
    fn state(&self) -> Result<&MoebiusState, Outcome> {
        self.state.as_ref().map_err(|e| e.clone().into())
    }

    fn normals(&mut self) -> Result<&PrincipalNormalDecomposition, GeomError> {
        if self.normals.is_none() {
            let fd = &self.state.as_ref().map_err(Clone::clone)?.fundamental;
            let mut rng = point_rng(self.plan.scenario.seed ^ 0x9e37_79b9_7f4a_7c15, self.index);
            self.normals = Some(principal_normals(fd, GROUPING_TOL, &mut rng));
        }
        self.normals.as_ref().expect("just filled").as_ref().map_err(Clone::clone)
    }

    fn closedness(&mut self) -> Result<(f64, f64), GeomError> {
        if self.closedness.is_none() {
            let st = self.state.as_ref().map_err(Clone::clone)?;
            self.closedness = Some(ClosednessParts::of(st).map(|p| (p.exact, p.ricci_identity)));
        }
        self.closedness.clone().expect("just filled")
    }

    fn with_ambiguity(&mut self, v: f64) -> Outcome {
        match self.normals().ok().and_then(|p| p.ambiguity) {
            Some(a) => Outcome::Warned(v, a.to_error().to_string()),
            None => Outcome::Value(v),
        }
    }

    fn evaluate(&mut self, check: Check) -> Outcome {
        let plan = self.plan;
        let x = self.x;
        match check {
            Check::JetAgreement => {
                let jets = evaluate_jet(&plan.chart, x, 3).and_then(|e| Ok((e, evaluate_jet(&plan.fd_chart, x, 3)?)));
                match jets {
                    Ok((exact, fd)) => Outcome::Value(
                        (1..=3)
                            .map(|k| exact.max_diff_at_order(&fd, k) / JET_TOLERANCES[k - 1])
                            .fold(0.0, f64::max),
                    ),
                    Err(e) => e.into(),
                }
            }
            Check::MoebiusLift => value(moebius_lift_metric_check(&plan.chart, x).map(|(a, b)| a.max(b))),
            Check::BetaTrace => match self.state() {
                Ok(st) => Outcome::Value(st.beta_trace().amax()),
                Err(o) => o,
            },
            Check::BetaNorm => match self.state() {
                Ok(st) => {
                    let n = st.n as f64;
                    Outcome::Value((st.beta_norm_sq() - (n - 1.0) / n).abs())
                }
                Err(o) => o,
            },
            Check::BlaschkeTrace => match self.state() {
                Ok(st) => {
                    let (tr, predicted) = st.blaschke_trace();
                    Outcome::Value((tr - predicted).abs())
                }
                Err(o) => o,
            },
            Check::BlaschkeAgreement => match self.state() {
                Ok(st) => value(st.blaschke_via_ric().map(|via| (st.blaschke_direct() - via).amax())),
                Err(o) => o,
            },
            Check::MoebiusCurvature => match (self.state(), plan.expected_kstar()) {
                (Err(o), _) => o,
                (Ok(_), None) => Outcome::NotApplicable,
                (Ok(_), Some(c)) => Outcome::Value(self.star.as_ref().expect("state is valid").constant_curvature_residual(c)),
            },
            Check::StarCurvatureAgreement => {
                if let Err(o) = self.state() {
                    return o;
                }
                let star = self.star.as_ref().expect("state is valid");
                match star_curvature_via_fd(&plan.chart, x, METRIC_FD_STEP) {
                    Ok(fd) => {
                        let n = plan.chart.intrinsic_dim;
                        let mut worst: f64 = 0.0;
                        for i in 0..n {
                            for j in i + 1..n {
                                let u = nalgebra::DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
                                let v = nalgebra::DVector::from_fn(n, |k, _| if k == j { 1.0 } else { 0.0 });
                                worst = worst.max((star.sectional(&u, &v) - fd.sectional(&u, &v)).abs());
                            }
                        }
                        Outcome::Value(worst)
                    }
                    Err(e) => e.into(),
                }
            }
            Check::ConformalGauss => match self.state() {
                Ok(st) => Outcome::Value(conformal_gauss_residual_of(st, None)),
                Err(o) => o,
            },
            Check::MoebiusFormClosed => value(self.closedness().map(|(exact, _)| exact)),
            Check::RicciIdentity => value(self.closedness().map(|(_, r1)| r1)),
            Check::RicciEquation => match self.state() {
                Ok(st) => Outcome::Value(ricci_equation_of(st).residual),
                Err(o) => o,
            },
            Check::Kulkarni => {
                if let Err(o) = self.state() {
                    return o;
                }
                if plan.chart.intrinsic_dim < 4 {
                    return Outcome::NotApplicable;
                }
                Outcome::Value(kulkarni_residual_of(self.star.as_ref().expect("state is valid"), None))
            }
            Check::NormalFlatness => match self.state() {
                Ok(st) => Outcome::Value(normal_bundle_flatness(&st.fundamental)),
                Err(o) => o,
            },
            Check::SectionalPrincipalNormals => {
                let fd = match self.state() {
                    Ok(st) => st.fundamental.clone(),
                    Err(o) => return o,
                };
                match self.normals().and_then(|pnd| sectional_vs_principal_normals(&fd, pnd)) {
                    Ok(v) => self.with_ambiguity(v),
                    Err(e) => e.into(),
                }
            }
            Check::MoebiusNormalDecomposition => {
                if let Err(o) = self.state() {
                    return o;
                }
                let r = {
                    let pnd = match self.normals() {
                        Ok(p) => p.clone(),
                        Err(e) => return e.into(),
                    };
                    let st = self.state.as_ref().expect("checked");
                    moebius_normal_decomposition(st, &pnd)
                };
                match r {
                    Ok(dec) => self.with_ambiguity(dec.checks.max()),
                    Err(GeomError::StructureMismatch { .. }) => Outcome::NotApplicable,
                    Err(e) => e.into(),
                }
            }
            Check::MultiplicityCensus => {
                if let Err(o) = self.state() {
                    return o;
                }
                let n = plan.chart.intrinsic_dim;
                let p = plan.chart.ambient_dim - n;
                match self.normals() {
                    Ok(pnd) => {
                        let pattern = pnd.pattern();
                        let moore = pattern.iter().any(|&k| k + p >= n);
                        let single = pattern.iter().filter(|&&k| k > 1).count() <= 1;
                        let ok = if moore && single { 0.0 } else { 1.0 };
                        match pnd.ambiguity {
                            Some(a) => Outcome::Warned(ok, a.to_error().to_string()),
                            None if ok == 0.0 => Outcome::Value(ok),
                            None => Outcome::Warned(ok, format!("multiplicity pattern {pattern:?}")),
                        }
                    }
                    Err(e) => Outcome::Warned(1.0, e.to_string()),
                }
            }
            Check::WarpedCriterion => match plan.family.as_ref().and_then(|f| f.warped_residuals(x)) {
                Some(r) => Outcome::Value(r.max()),
                None => Outcome::NotApplicable,
            },
            Check::MeanCurvatureCondition => match plan.family.as_ref().and_then(|f| f.mean_curvature_residuals(x)) {
                Some(r) => Outcome::Value(r.max()),
                None => Outcome::NotApplicable,
            },
            Check::Dupin => {
                let seed = plan.scenario.seed.wrapping_add(self.index as u64);
                match dupin_residual(&plan.chart, x, GROUPING_TOL, seed, DUPIN_STEP) {
                    Ok(v) => Outcome::Value(v),
                    Err(GeomError::NotFlat { .. }) => Outcome::NotApplicable,
                    Err(e) => e.into(),
                }
            }
        }
    }
}
