use std::path::PathBuf;
use std::process::{Command, Output};

use duality_lab::experiment::Check;
use duality_lab::output::failure_summary;
use duality_lab::{parse_config, run_experiment, SweepResult};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_duality-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn config(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", name].iter().collect();
    path.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let k = lines.next().unwrap().split(',').position(|c| c == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn qbs_sweep_to_stdout() {
    let o = run(&["qbs", "--config", &config("qbs_sweep.conf")]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.starts_with("theta,p1,p2\n"));
    assert_eq!(csv.lines().count(), 65);
    let theta = column(&csv, "theta");
    for (t, p1) in theta.iter().zip(column(&csv, "p1")) {
        assert!((p1 - (0.5 + 0.25 * t.cos())).abs() < 1e-12);
    }
}

#[test]
fn demo_config_reports_naive_overshoot() {
    let o = run(&["conditioned", "--config", &config("complementarity_demo.conf")]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!((column(&csv, "sum")[0] - 1.0).abs() < 1e-12);
    assert!((column(&csv, "naive_sum")[0] - 1.25).abs() < 1e-12);
    assert!((column(&csv, "naive_D")[0] - 0.75).abs() < 1e-12);
}

#[test]
fn two_path_grid_matches_closed_forms() {
    let o = run(&["duality", "--config", &config("two_path_grid.conf")]);
    let csv = stdout(&o);
    for ((c1, d), c) in column(&csv, "c1").iter().zip(column(&csv, "D")).zip(column(&csv, "C")) {
        let c1_sq = c1 * c1;
        assert!((d - c1_sq * 0.5).abs() < 1e-12);
        assert!((c - (1.0 - c1_sq + c1_sq * 0.5)).abs() < 1e-12);
    }
}

#[test]
fn mixed_dephasing_respects_the_bound() {
    let o = run(&["mixed", "--config", &config("mixed_dephasing.conf")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 1 + 11 * 7);
    let sums: Vec<f64> = csv
        .lines()
        .skip(1)
        .filter_map(|l| l.split(',').nth(4).filter(|f| !f.is_empty()).map(|f| f.parse().unwrap()))
        .collect();
    assert!(!sums.is_empty());
    assert!(sums.iter().all(|s| *s <= 1.0 + 1e-9));
}

#[test]
fn out_file_and_byte_identical_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let o = run(&["verify", "--seed", "7", "--samples", "200", "--out", path.to_str().unwrap()]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn verify_thousand_samples_passes() {
    let o = run(&["verify", "--seed", "42", "--samples", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn verify_without_seed_fails_with_json() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["status"], "error");
}

#[test]
fn set_overrides_config_and_reports_bad_values() {
    let o = run(&["duality", "--config", &config("two_path_grid.conf"), "--set", "c1=0.3"]);
    assert_eq!(stdout(&o).lines().count(), 2);

    let o = run(&["duality", "--set", "p=0.5,0.6"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["message"].as_str().unwrap().contains("--set #1"));

    let o = run(&["qbs", "--set", "bogus=1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn kind_conflict_is_rejected() {
    let o = run(&["bbs", "--config", &config("qbs_sweep.conf")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_output() {
    let o = run(&["expand", "--set", "overlap=0:1:5", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert_eq!(v["columns"][0], "overlap");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn empty_grid_header_only() {
    let o = run(&["bbs", "--set", "theta_grid=0:1:0"]);
    assert_eq!(stdout(&o), "theta,p1,p2\n");
}

#[test]
fn failure_summary_is_machine_readable() {
    let spec = parse_config("kind=qbs\ntheta=0").unwrap();
    let mut result: SweepResult = run_experiment(&spec).unwrap();
    result.checks.push(Check::new("forced", 3, 0.5, 1e-9));
    assert!(!result.passed());
    let v: serde_json::Value = serde_json::from_str(&failure_summary(&result)).unwrap();
    assert_eq!(v["status"], "failed");
    assert_eq!(v["failures"].as_array().unwrap().len(), 1);
    assert_eq!(v["failures"][0]["name"], "forced");
}
