use std::process::Command;

use modvar_core::readout::ObservableSpec;
use serde_json::Value;

fn modvar(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_modvar")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn fig2_runs_clean() {
    let dir = tempfile::tempdir().unwrap();
    let script = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fig2.mv");
    let (code, stdout) = modvar(&["run", script, "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    let recs: Vec<Value> = stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(recs.iter().filter(|r| !r["pass"].is_null()).all(|r| r["pass"] == true));
    assert!(dir.path().join("plus_p.csv").exists());
}

#[test]
fn user_errors_exit_one_with_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("bad.mv");
    std::fs::write(&script, "state q = comb()\napply X q9\n").unwrap();
    let (code, stdout) = modvar(&["run", script.to_str().unwrap()]);
    assert_eq!(code, 1);
    let rec: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(rec["kind"], "error");
    assert_eq!(rec["line"], 2);
    assert!(rec["message"].as_str().unwrap().contains("q9"));

    let (code, _) = modvar(&["run", dir.path().join("missing.mv").to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn failed_expectations_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("off.mv");
    std::fs::write(&script, "state q = logical(theta=0, phi=0)\nmeasure expectation ReZ q expect=0.5\n").unwrap();
    let (code, _) = modvar(&["run", script.to_str().unwrap(), "--tolerance", "0.1"]);
    assert_eq!(code, 2);
    let (code, _) = modvar(&["run", script.to_str().unwrap(), "--tolerance", "0.5"]);
    assert_eq!(code, 0);
}

#[test]
fn check_suite_passes() {
    let (code, stdout) = modvar(&["check", "--states", "5"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.lines().count() >= 7);
}

#[test]
fn dump_observable_round_trips() {
    let (code, stdout) = modvar(&["dump-observable", "ReY"]);
    assert_eq!(code, 0);
    let spec: ObservableSpec = serde_json::from_str(&stdout).unwrap();
    assert_eq!(spec.coeffs.len(), 2);
    let ell = 2.0 * std::f64::consts::PI.sqrt();
    assert!((spec.period_x - ell).abs() < 1e-15 && (spec.period_p - ell / 2.0).abs() < 1e-15);
    let (code, stdout) = modvar(&["dump-observable", "G1Z"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"step\":\"z\""));
    assert_eq!(modvar(&["dump-observable", "ReW"]).0, 1);
}
