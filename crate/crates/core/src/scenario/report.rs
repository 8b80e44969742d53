//! Run reports, curvature profiles and atomic output.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::Scenario;
use super::registry::Check;
use super::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Warn,
    Fail,
    /// Not applicable anywhere on the grid.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckVerdict {
    pub check: &'static str,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub max_residual: Option<f64>,
    /// Points with a residual above tolerance or a numerical error.
    pub failures: usize,
    pub not_applicable: usize,
    pub warnings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRow {
    pub point_index: usize,
    pub point: Vec<f64>,
    /// Core arclength, for curve-based families.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    pub rho: Option<f64>,
    pub kstar_min: Option<f64>,
    pub kstar_max: Option<f64>,
    /// `None` where the check does not apply or failed with an error.
    pub residuals: BTreeMap<&'static str, Option<f64>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub errors: BTreeMap<&'static str, String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub warnings: BTreeMap<&'static str, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub version: &'static str,
    pub seed: u64,
    pub grid_counts: Vec<usize>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    pub chart: String,
    pub environment: Environment,
    pub verdicts: Vec<CheckVerdict>,
    pub rows: Vec<PointRow>,
    #[serde(skip)]
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.verdict != Verdict::Fail)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Whether a curvature profile is meaningful (curve-based family).
    pub fn has_profile(&self) -> bool {
        self.rows.iter().any(|r| r.s.is_some())
    }

    pub fn profile_csv(&self) -> String {
        let mut out = String::from("point_index,s,rho,kstar_min,kstar_max");
        for c in &self.checks {
            out.push(',');
            out.push_str(c.name());
        }
        out.push('\n');
        let cell = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for r in &self.rows {
            let mut line = format!(
                "{},{},{},{},{}",
                r.point_index,
                cell(r.s),
                cell(r.rho),
                cell(r.kstar_min),
                cell(r.kstar_max)
            );
            for c in &self.checks {
                line.push(',');
                line.push_str(&cell(r.residuals.get(c.name()).copied().flatten()));
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let worst = v.max_residual.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:<30} {:<7} max {:<10} tol {:.1e}  failures {}\n",
                v.check,
                format!("{:?}", v.verdict).to_lowercase(),
                worst,
                v.tolerance,
                v.failures
            ));
        }
        out
    }

    /// Writes `<prefix>.report.json` and, for curve-based families,
    /// `<prefix>.profile.csv`. Returns the paths written.
    pub fn write(&self, prefix: &str) -> Result<Vec<PathBuf>, ScenarioError> {
        let mut written = Vec::new();
        let report = PathBuf::from(format!("{prefix}.report.json"));
        write_atomic(&report, self.to_json().as_bytes())?;
        written.push(report);
        if self.has_profile() {
            let profile = PathBuf::from(format!("{prefix}.profile.csv"));
            write_atomic(&profile, self.profile_csv().as_bytes())?;
            written.push(profile);
        }
        Ok(written)
    }
}

/// Writes to a sibling temporary file, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ScenarioError> {
    let io = |source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(bytes).map_err(io)?;
    file.sync_all().map_err(io)?;
    drop(file);
    fs::rename(&tmp, path).map_err(io)
}
