use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moebius-lab"))
        .args(args)
        .env_remove("MOEBIUS_LAB_JOBS")
        .output()
        .expect("binary runs")
}

fn bundled(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .display()
        .to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_checks_shows_the_registry() {
    let out = lab(&["list-checks"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for name in ["conformal_gauss", "kulkarni", "moebius_form_closed", "warped_criterion", "dupin"] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
    assert!(text.contains("Kulkarni's formula"));
}

#[test]
fn validate_accepts_bundled_scenarios() {
    for name in ["flat_cylinder.scenario", "spiral_cneg.scenario", "inverted_cone.scenario", "ellipsoid_control.scenario"] {
        let out = lab(&["validate", &bundled(name)]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert!(stdout(&out).contains("points"));
    }
}

#[test]
fn missing_field_is_a_config_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "broken.scenario",
        r#"{"family": {"core": {"type": "spiral", "case": "flat_c0"}, "n": 3, "p": 1, "ell": 0}}"#,
    );
    for cmd in ["validate", "run"] {
        let out = lab(&[cmd, &path]);
        assert_eq!(out.status.code(), Some(2));
        assert!(stderr(&out).contains("kind"), "{}", stderr(&out));
    }
}

#[test]
fn missing_file_exits_with_two() {
    let out = lab(&["run", "/nonexistent/none.scenario"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn passing_run_writes_report_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("fc").display().to_string();
    let out = lab(&["run", &bundled("flat_cylinder.scenario"), "--out", &prefix, "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}{}", stdout(&out), stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(format!("{prefix}.report.json")).unwrap()).unwrap();
    assert!(report["verdicts"].as_array().unwrap().iter().all(|v| v["verdict"] == "pass"));
    let csv = std::fs::read_to_string(format!("{prefix}.profile.csv")).unwrap();
    assert!(csv.starts_with("point_index,s,rho,kstar_min,kstar_max,"));
}

#[test]
fn failing_checks_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "control.scenario",
        r#"{"control": "ellipsoid_cross_line", "grid": {"counts": 2}, "checks": ["kulkarni"]}"#,
    );
    let out = lab(&["run", &path]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    // default prefix is the scenario path without its extension
    assert!(dir.path().join("control.report.json").exists());
    assert!(!dir.path().join("control.profile.csv").exists());
}

#[test]
fn tolerance_override_changes_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "control.scenario",
        r#"{"control": "ellipsoid_cross_line", "grid": {"counts": 2}, "checks": ["kulkarni"], "output": "ignored"}"#,
    );
    let prefix = dir.path().join("loose").display().to_string();
    let out = lab(&["run", &path, "--out", &prefix, "--tol", "kulkarni=10"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let bad = lab(&["run", &path, "--out", &prefix, "--tol", "kulkarni"]);
    assert_eq!(bad.status.code(), Some(2));
    let unknown = lab(&["run", &path, "--out", &prefix, "--tol", "nope=1"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn jobs_can_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("env").display().to_string();
    let out = Command::new(env!("CARGO_BIN_EXE_moebius-lab"))
        .args(["run", &bundled("flat_cylinder.scenario"), "--out", &prefix])
        .env("MOEBIUS_LAB_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_moebius-lab"))
        .args(["run", &bundled("flat_cylinder.scenario"), "--out", &prefix])
        .env("MOEBIUS_LAB_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
