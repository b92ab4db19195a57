//! Exit codes and output locations of the command line tool.

use std::path::Path;
use std::process::{Command, Output};

fn chaoslab(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_chaoslab"));
    cmd.args(args).env_remove("CHAOSLAB_OUT");
    if let Some(dir) = out {
        cmd.env("CHAOSLAB_OUT", dir);
    }
    cmd.output().unwrap()
}

fn config(dir: &Path, json: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn passing_suite_exits_zero_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = chaoslab(&["verify", "capacity"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("capacity.json").is_file());
    assert!(dir.path().join("capacity-equilibrium.csv").is_file());
    assert!(String::from_utf8_lossy(&out.stderr).contains("pass  equilibrium-energy"));
}

#[test]
fn failing_criterion_exits_one() {
    let out = chaoslab(&["verify", "covering"], None);
    assert_eq!(out.status.code(), Some(1));
    let result: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(result["passed"], false);
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(chaoslab(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(chaoslab(&["verify", "no-such-suite"], None).status.code(), Some(2));
    assert_eq!(chaoslab(&["--threads", "0", "capacity"], None).status.code(), Some(2));
    let bad = config(dir.path(), r#"{"gamma": 5}"#);
    assert_eq!(chaoslab(&["--config", &bad, "sample-field"], None).status.code(), Some(2));
    let mismatched = config(dir.path(), r#"{"suite": "holder"}"#);
    assert_eq!(chaoslab(&["--config", &mismatched, "verify", "capacity"], None).status.code(), Some(2));
    assert_eq!(chaoslab(&["--config", "/nonexistent/config.json", "capacity"], None).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), r#"{"replicas": 1, "deltas": [3.45], "bandwidth": 0.02}"#);
    let out = chaoslab(&["--config", &cfg, "spectrum"], None);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn outputs_follow_flags_and_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let cfg = config(env_dir.path(), r#"{"resolution": 8, "epsilon_exponent": 8}"#);

    let out = chaoslab(&["--config", &cfg, "--seed", "5", "build-measure"], Some(env_dir.path()));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(env_dir.path().join("measure.json")).unwrap()).unwrap();
    assert_eq!(json["provenance"]["master_seed"], 5);

    let flag = flag_dir.path().to_str().unwrap();
    let out = chaoslab(
        &["--config", &cfg, "--out", flag, "--format", "csv", "welding"],
        Some(env_dir.path()),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_dir(flag_dir.path()).unwrap().any(|e| {
        e.unwrap().path().extension().is_some_and(|x| x == "csv")
    }));

    let stdout = chaoslab(&["--config", &cfg, "--format", "csv", "sample-field"], None);
    assert_eq!(stdout.status.code(), Some(0));
    let text = String::from_utf8(stdout.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 256);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), r#"{"resolution": 8, "epsilon_exponent": 8}"#);
    let a = chaoslab(&["--config", &cfg, "--threads", "1", "welding"], None);
    let b = chaoslab(&["--config", &cfg, "--threads", "3", "welding"], None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
