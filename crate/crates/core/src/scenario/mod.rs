//! Config-driven runs of the residual checks over a sample grid.

mod config;
mod registry;
mod report;
mod runner;

use thiserror::Error;

pub use config::{reduce_to_cap, CheckEntry, Counts, GridSpec, Plan, Scenario, DEFAULT_CAP, DEFAULT_COUNT, DEFAULT_MARGIN};
pub use registry::{list_checks, Check, CheckInfo, REGISTRY};
pub use report::{write_atomic, CheckVerdict, Environment, PointRow, Report, Verdict};
pub use runner::{run, JET_TOLERANCES, KSTAR_PLANES, METRIC_FD_STEP};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Parses, plans and runs the scenario at `path`.
pub fn run_scenario(path: &std::path::Path, overrides: &[(String, f64)], jobs: usize) -> Result<Report, ScenarioError> {
    let plan = Plan::new(Scenario::from_path(path)?, overrides)?;
    run(&plan, jobs)
}
