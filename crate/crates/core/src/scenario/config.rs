//! Scenario files: which chart, which sample grid, which checks.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::registry::Check;
use super::ScenarioError;
use crate::chart::ImmersionChart;
use crate::constructions::{build_family, transform_chart, ConformalMap, Control, Family, FamilySpec};

pub const DEFAULT_COUNT: usize = 5;
pub const DEFAULT_CAP: usize = 5000;
pub const DEFAULT_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    /// A bundled negative-control chart instead of a family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<Control>,
    /// Conformal map applied to the chart before any check runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<ConformalMap>,
    #[serde(default)]
    pub grid: GridSpec,
    /// Empty means every non-optional registered check.
    #[serde(default)]
    pub checks: Vec<CheckEntry>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub counts: Counts,
    /// Absolute inset from every face of the domain.
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default = "default_cap")]
    pub cap: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            counts: Counts::default(),
            margin: DEFAULT_MARGIN,
            cap: DEFAULT_CAP,
        }
    }
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

fn default_cap() -> usize {
    DEFAULT_CAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Counts {
    Uniform(usize),
    PerAxis(Vec<usize>),
}

impl Default for Counts {
    fn default() -> Self {
        Counts::Uniform(DEFAULT_COUNT)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckEntry {
    Name(String),
    Tuned { name: String, tol: f64 },
}

impl CheckEntry {
    pub fn name(&self) -> &str {
        match self {
            CheckEntry::Name(n) | CheckEntry::Tuned { name: n, .. } => n,
        }
    }
}

impl Scenario {
    /// Parses JSON, reporting the failing field path and position.
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            ScenarioError::Config(format!(
                "at `{path}` (line {}, column {}): {inner}",
                inner.line(),
                inner.column()
            ))
        })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// A validated scenario with its chart, checks and sample points resolved.
#[derive(Clone)]
pub struct Plan {
    pub scenario: Scenario,
    pub chart: ImmersionChart,
    /// Same map with finite-difference jets, for the jet cross-check.
    pub fd_chart: ImmersionChart,
    pub family: Option<Arc<Family>>,
    pub checks: Vec<(Check, f64)>,
    pub counts: Vec<usize>,
    pub points: Vec<Vec<f64>>,
}

impl std::fmt::Debug for Plan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Plan")
            .field("chart", &self.chart.label)
            .field("checks", &self.checks)
            .field("counts", &self.counts)
            .finish()
    }
}

impl Plan {
    /// Resolves `scenario`; `overrides` replace tolerances by check name.
    pub fn new(scenario: Scenario, overrides: &[(String, f64)]) -> Result<Self, ScenarioError> {
        let config = |m: String| ScenarioError::Config(m);
        let (family, chart) = match (&scenario.family, scenario.control) {
            (Some(spec), None) => {
                let fam = build_family(spec).map_err(|e| config(format!("family: {e}")))?;
                let chart = fam.chart.clone();
                (Some(Arc::new(fam)), chart)
            }
            (None, Some(control)) => (None, control.chart()),
            _ => return Err(config("exactly one of `family` and `control` must be given".into())),
        };
        let chart = match &scenario.transform {
            Some(map) => transform_chart(&chart, map).map_err(|e| config(format!("transform: {e}")))?,
            None => chart,
        };

        let mut checks: Vec<(Check, f64)> = if scenario.checks.is_empty() {
            Check::defaults().into_iter().map(|c| (c, c.info().default_tolerance)).collect()
        } else {
            let mut out = Vec::new();
            for (i, entry) in scenario.checks.iter().enumerate() {
                let check = Check::from_name(entry.name())
                    .ok_or_else(|| config(format!("checks[{i}]: unknown check `{}`", entry.name())))?;
                let tol = match entry {
                    CheckEntry::Tuned { tol, .. } => *tol,
                    CheckEntry::Name(_) => check.info().default_tolerance,
                };
                if out.iter().any(|(c, _)| *c == check) {
                    return Err(config(format!("checks[{i}]: `{}` listed twice", entry.name())));
                }
                out.push((check, tol));
            }
            out
        };
        for (name, tol) in overrides {
            let check = Check::from_name(name).ok_or_else(|| config(format!("--tol: unknown check `{name}`")))?;
            match checks.iter_mut().find(|(c, _)| *c == check) {
                Some(entry) => entry.1 = *tol,
                None => return Err(config(format!("--tol: check `{name}` is not part of this scenario"))),
            }
        }
        if let Some((c, t)) = checks.iter().find(|(_, t)| !(t.is_finite() && *t > 0.0)) {
            return Err(config(format!("tolerance for `{}` must be positive, got {t}", c.name())));
        }

        let n = chart.intrinsic_dim;
        let mut counts = match &scenario.grid.counts {
            Counts::Uniform(k) => vec![*k; n],
            Counts::PerAxis(v) if v.len() == n => v.clone(),
            Counts::PerAxis(v) => {
                return Err(config(format!("grid.counts: expected {n} entries, got {}", v.len())));
            }
        };
        if counts.contains(&0) {
            return Err(config("grid.counts: every axis needs at least one sample".into()));
        }
        if scenario.grid.cap == 0 {
            return Err(config("grid.cap must be positive".into()));
        }
        reduce_to_cap(&mut counts, scenario.grid.cap);
        let margin = scenario.grid.margin;
        let domain = &chart.domain;
        let narrowest = (0..n).map(|i| domain.upper()[i] - domain.lower()[i]).fold(f64::INFINITY, f64::min);
        if !(margin > 0.0 && 2.0 * margin < narrowest) {
            return Err(config(format!("grid.margin {margin} must be positive and below half the narrowest side")));
        }
        let points = domain.grid(&counts, margin);
        let fd_chart = chart.to_finite_difference();
        Ok(Plan {
            scenario,
            chart,
            fd_chart,
            family,
            checks,
            counts,
            points,
        })
    }

    /// Target Moebius curvature, when the construction has one.
    pub fn expected_kstar(&self) -> Option<f64> {
        self.family.as_ref().and_then(|f| f.expected_kstar)
    }
}

/// Lowers the largest per-axis count, trailing axes first, until the tensor grid fits in `cap`.
pub fn reduce_to_cap(counts: &mut [usize], cap: usize) {
    while counts.iter().product::<usize>() > cap {
        let (i, _) = counts
            .iter()
            .enumerate()
            .max_by_key(|(_, &k)| k)
            .expect("at least one axis");
        if counts[i] == 1 {
            break;
        }
        counts[i] -= 1;
    }
}
