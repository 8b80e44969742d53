use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use moebius_core::scenario::{list_checks, run, Plan, Scenario, ScenarioError};

#[derive(Parser)]
#[command(name = "moebius-lab", version, about = "Moebius invariants of submanifolds, checked over sample grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write `<prefix>.report.json` (plus a profile CSV
    /// for curve-based families).
    Run {
        scenario: PathBuf,
        /// Output prefix; defaults to the scenario's `output` field, then to
        /// the scenario path without extension.
        #[arg(long)]
        out: Option<String>,
        #[arg(long, env = "MOEBIUS_LAB_JOBS")]
        jobs: Option<usize>,
        /// Tolerance override, repeatable.
        #[arg(long = "tol", value_name = "CHECK=VAL", value_parser = parse_tol)]
        tol: Vec<(String, f64)>,
    },
    /// Registered checks with default tolerances.
    ListChecks,
    /// Parse and resolve a scenario without running it.
    Validate { scenario: PathBuf },
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, val) = s.split_once('=').ok_or_else(|| format!("expected CHECK=VAL, got `{s}`"))?;
    let val: f64 = val.parse().map_err(|e| format!("tolerance `{val}`: {e}"))?;
    Ok((name.to_string(), val))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<ExitCode, ScenarioError> {
    match command {
        Command::ListChecks => {
            print!("{}", list_checks());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { scenario } => {
            let plan = Plan::new(Scenario::from_path(&scenario)?, &[])?;
            println!(
                "{}: {} checks on {} points ({})",
                scenario.display(),
                plan.checks.len(),
                plan.points.len(),
                plan.chart.label
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { scenario, out, jobs, tol } => {
            let parsed = Scenario::from_path(&scenario)?;
            let prefix = out
                .or_else(|| parsed.output.clone())
                .unwrap_or_else(|| scenario.with_extension("").display().to_string());
            let plan = Plan::new(parsed, &tol)?;
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let report = run(&plan, jobs)?;
            print!("{}", report.summary());
            for path in report.write(&prefix)? {
                println!("wrote {}", path.display());
            }
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
