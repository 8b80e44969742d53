use std::path::PathBuf;

use moebius_core::scenario::{run, run_scenario, write_atomic, Plan, Scenario, ScenarioError, Verdict};

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

const SMALL: &str = r#"{
    "name": "small",
    "family": {"kind": "cylinder", "core": {"type": "spiral", "case": "flat_cneg", "c": -1.0}, "n": 3, "p": 1, "ell": 0},
    "grid": {"counts": 3},
    "seed": 9
}"#;

#[test]
fn bundled_scenarios_validate() {
    let dir = bundled("");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let scenario = Scenario::from_path(&path).unwrap();
        let plan = Plan::new(scenario, &[]).unwrap();
        assert!(!plan.points.is_empty() && plan.points.len() <= 5000, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 4);
}

#[test]
fn flat_cylinder_passes() {
    let report = run_scenario(&bundled("flat_cylinder.scenario"), &[], 2).unwrap();
    assert!(report.passed(), "{}", report.summary());
    assert!(report.has_profile());
}

#[test]
fn runs_are_reproducible() {
    let plan = Plan::new(Scenario::from_json(SMALL).unwrap(), &[]).unwrap();
    let a = run(&plan, 1).unwrap();
    let b = run(&plan, 3).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.profile_csv(), b.profile_csv());
}

#[test]
fn profile_header_lists_check_columns() {
    let plan = Plan::new(Scenario::from_json(SMALL).unwrap(), &[]).unwrap();
    let csv = run(&plan, 1).unwrap().profile_csv();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("point_index,s,rho,kstar_min,kstar_max,"));
    assert!(header.contains(",conformal_gauss,"));
    assert_eq!(csv.lines().count(), 1 + plan.points.len());
}

#[test]
fn controls_fail_the_curvature_checks() {
    let text = r#"{"control": "polynomial_graph", "grid": {"counts": 2}, "checks": ["kulkarni", "normal_flatness", "beta_norm"]}"#;
    let plan = Plan::new(Scenario::from_json(text).unwrap(), &[]).unwrap();
    let report = run(&plan, 1).unwrap();
    let verdict = |name: &str| report.verdicts.iter().find(|v| v.check == name).unwrap().verdict;
    assert_eq!(verdict("kulkarni"), Verdict::Fail);
    assert_eq!(verdict("normal_flatness"), Verdict::Pass);
    assert_eq!(verdict("beta_norm"), Verdict::Pass);
    assert!(!report.passed());
}

#[test]
fn target_curvature_is_skipped_without_a_family() {
    let text = r#"{"control": "ellipsoid_cross_line", "grid": {"counts": 2}, "checks": ["moebius_curvature"]}"#;
    let report = run(&Plan::new(Scenario::from_json(text).unwrap(), &[]).unwrap(), 1).unwrap();
    assert_eq!(report.verdicts[0].verdict, Verdict::Skipped);
    assert!(!report.has_profile());
}

#[test]
fn transform_keeps_the_target_curvature() {
    let text = SMALL.replace(
        r#""seed": 9"#,
        r#""seed": 9, "transform": {"type": "inversion", "center": [2.0, -3.0, 1.0, 2.5], "radius": 1.5}, "checks": ["moebius_curvature"]"#,
    );
    let report = run(&Plan::new(Scenario::from_json(&text).unwrap(), &[]).unwrap(), 1).unwrap();
    assert_eq!(report.verdicts[0].verdict, Verdict::Pass, "{}", report.summary());
}

#[test]
fn config_errors_are_reported() {
    let both = r#"{"control": "twisted_surface", "family": {"kind": "cylinder", "core": {"type": "spiral", "case": "flat_c0"}, "n": 2, "p": 1, "ell": 0}}"#;
    assert!(matches!(Plan::new(Scenario::from_json(both).unwrap(), &[]), Err(ScenarioError::Config(_))));
    let typo = SMALL.replace("\"seed\"", "\"sede\"");
    assert!(Scenario::from_json(&typo).unwrap_err().to_string().contains("sede"));
    let wrong_axes = SMALL.replace(r#""counts": 3"#, r#""counts": [3, 3]"#);
    assert!(Plan::new(Scenario::from_json(&wrong_axes).unwrap(), &[]).is_err());
    let plan = Plan::new(Scenario::from_json(SMALL).unwrap(), &[("beta_trace".into(), -1.0)]);
    assert!(plan.is_err());
}

#[test]
fn atomic_write_replaces_and_cleans_up() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/out.report.json");
    write_atomic(&path, b"first").unwrap();
    write_atomic(&path, b"second").unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), b"second");
    let leftovers: Vec<_> = std::fs::read_dir(path.parent().unwrap())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(leftovers.len(), 1, "{leftovers:?}");
}

#[test]
fn atomic_write_reports_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let err = write_atomic(&blocker.join("out.json"), b"y").unwrap_err();
    assert!(matches!(err, ScenarioError::Io { .. }));
    assert!(err.to_string().contains("out.json"));
}
