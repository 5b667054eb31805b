// Copyright 2026 nmrqip contributors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nmrqip(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmrqip"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn unknown_experiment_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = nmrqip(&["nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let v = stdout_json(&o);
    assert_eq!(v["error"], "unknown_experiment");
    assert!(v["valid"].as_array().unwrap().iter().any(|e| e == "transfer"));
}

#[test]
fn bad_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ising.json");
    fs::write(&cfg, r#"{"points": 11, "colour": "red"}"#).unwrap();
    let o = nmrqip(&["ising", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout_json(&o)["error"], "bad_config");
    let missing = dir.path().join("missing.json");
    let o = nmrqip(&["ising", "--config", missing.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unconverged_grape_exits_4_and_keeps_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grape.json");
    fs::write(&cfg, r#"{"n_steps": 50, "grape": {"max_iters": 1, "target_fidelity": 0.999}}"#).unwrap();
    let o = nmrqip(&["grape", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stdout_json(&o)["error"], "not_converged");
    assert!(dir.path().join("grape.csv").exists());
    assert!(dir.path().join("grape_pulse.json").exists());
    assert!(dir.path().join("grape.manifest.json").exists());
}

#[test]
fn runs_are_reproducible_and_hashed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("xxz.json");
    fs::write(&cfg, r#"{"gamma_min": -1.2, "gamma_max": 1.2, "step": 0.2, "restarts": 4}"#).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = nmrqip(&["xxz", "--config", cfg.to_str().unwrap(), "--seed", "5"], d);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    }
    let csv_a = fs::read(a.join("xxz.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.join("xxz.csv")).unwrap());
    assert_eq!(String::from_utf8(csv_a).unwrap().lines().count(), 14);
    let m: Value = serde_json::from_str(&fs::read_to_string(a.join("xxz.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 5);
    assert_eq!(m["fixtures"]["config"], nmrqip::harness::sha256_hex(&fs::read(&cfg).unwrap()));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nmrqip"))
        .arg("distill")
        .env("NMRQIP_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("distill.csv").exists());
}

#[test]
fn tampered_tolerance_fails_only_its_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let mut tol: Value = serde_json::from_str(include_str!("../fixtures/tolerances.json")).unwrap();
    tol["rf_retention"] = serde_json::json!([0.2, 0.3]);
    let path = dir.path().join("tol.json");
    fs::write(&path, tol.to_string()).unwrap();
    let o = nmrqip(&["repro", "--only", "11,14", "--tolerances", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8_lossy(&o.stdout);
    let line = |id: &str| text.lines().find(|l| l.trim_start().starts_with(id)).unwrap().to_string();
    assert!(line("11 ").contains("PASS"), "{text}");
    assert!(line("14 ").contains("FAIL"), "{text}");
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("repro_summary.json")).unwrap()).unwrap();
    assert_eq!(summary.as_array().unwrap().len(), 2);
}

#[test]
fn list_prints_experiments_and_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let o = nmrqip(&["--list"], dir.path());
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 13);
    let o = nmrqip(&["repro", "--list"], dir.path());
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 15);
}
