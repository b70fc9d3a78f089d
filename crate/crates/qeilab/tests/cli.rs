//! End-to-end tests of the command-line binary: report emission, exit
//! codes, determinism of the JSON output.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qeilab"))
}

fn write_cfg(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> Output {
    bin().args(args).arg("--config").arg(cfg).arg("--out").arg(out).output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn scan_ising_emits_witness_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), r#"{"model": {"kind": "ising", "mass": 1.0}}"#);
    let out = run(&["scan"], &cfg, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&dir.path().join("scan.json"));
    assert_eq!(doc["kind"], "scan");
    assert_eq!(doc["result"]["witness_found"], true);
    assert!(doc["result"]["theta_p"].as_f64().unwrap() > 0.0);
    assert!(doc["result"]["witness_energy"].as_f64().unwrap() < 0.0);
    assert_eq!(doc["meta"]["config_sha256"].as_str().unwrap().len(), 64);
    let csv = std::fs::read_to_string(dir.path().join("fp_scan.csv")).unwrap();
    assert!(csv.starts_with("theta,abs_fp,ratio"));
    assert_eq!(csv.lines().count(), 1002);
}

#[test]
fn scan_free_field_finds_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), r#"{"model": {"kind": "free", "mass": 1.0}}"#);
    let out = run(&["scan"], &cfg, dir.path());
    assert!(out.status.success());
    let doc = json(&dir.path().join("scan.json"));
    assert_eq!(doc["result"]["witness_found"], false);
    assert_eq!(doc["result"]["theta_p"], serde_json::Value::Null);
}

#[test]
fn classify_reports_verdict_and_alpha_window() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        r#"{"model": {"kind": "free", "mass": 1.0}, "polynomial": {"alpha": 0.3}}"#,
    );
    let out = run(&["classify"], &cfg, dir.path());
    assert!(out.status.success());
    let doc = json(&dir.path().join("classify.json"));
    assert_eq!(doc["result"]["verdict"]["verdict"], "Holds");
    let c = doc["result"]["verdict"]["c"].as_f64().unwrap();
    assert!((c - 0.3).abs() < 1e-3);
    assert!((doc["result"]["admissible_alpha_bound"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn minimize_writes_bound_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        r#"{"model": {"kind": "ising", "mass": 1.0},
            "test_function": {"kind": "gaussian", "sigma": 0.5},
            "grid_ladder": [[8.0, 64], [8.0, 128]], "tolerance": 1e-3}"#,
    );
    let out = run(&["minimize"], &cfg, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&dir.path().join("minimize.json"));
    assert!(doc["result"]["lambda_min"].as_f64().unwrap() < 0.0);
    assert_eq!(doc["result"]["ladder"].as_array().unwrap().len(), 2);
    assert!(dir.path().join("witness.csv").exists());
}

#[test]
fn minimize_strict_flags_nonconvergence() {
    let dir = tempfile::tempdir().unwrap();
    // a single-stage ladder can never certify convergence
    let cfg = write_cfg(
        dir.path(),
        r#"{"model": {"kind": "free", "mass": 1.0}, "grid_ladder": [[6.0, 32]]}"#,
    );
    let out = run(&["minimize", "--strict"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(3));
    // non-strict: same situation is recorded in the report, exit 0
    let out = run(&["minimize"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&dir.path().join("minimize.json"));
    assert_eq!(doc["result"]["converged"], false);
}

#[test]
fn bound_flags_gaussian_extrapolation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        r#"{"model": {"kind": "ising", "mass": 1.0},
            "test_function": {"kind": "gaussian", "sigma": 1.0}}"#,
    );
    let out = run(&["bound"], &cfg, dir.path());
    assert!(out.status.success());
    let doc = json(&dir.path().join("bound.json"));
    let v = doc["result"]["value"].as_f64().unwrap();
    assert!((v - -0.01047245226582756).abs() < 1e-8 * 0.0105);
    assert_eq!(doc["result"]["extrapolation"], true);
    assert!(dir.path().join("q_table.csv").exists());

    let cfg = write_cfg(
        dir.path(),
        r#"{"model": {"kind": "ising", "mass": 1.0},
            "test_function": {"kind": "bump", "sigma": 1.0}}"#,
    );
    let out = run(&["bound"], &cfg, dir.path());
    assert!(out.status.success());
    let doc = json(&dir.path().join("bound.json"));
    assert_eq!(doc["result"]["extrapolation"], false);
}

#[test]
fn verify_free_model_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        r#"{"model": {"kind": "free", "mass": 1.0},
            "grid_ladder": [[8.0, 64], [8.0, 128]], "tolerance": 1e-3}"#,
    );
    let out = run(&["verify"], &cfg, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&dir.path().join("verify.json"));
    assert_eq!(doc["result"]["all_pass"], true);
    assert_eq!(doc["result"]["rows"].as_array().unwrap().len(), 3);
    let csv = std::fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn report_summarizes_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), r#"{"model": {"kind": "free", "mass": 1.0}}"#);
    assert!(run(&["classify"], &cfg, dir.path()).status.success());
    let out = bin().arg("report").arg("--out").arg(dir.path()).output().unwrap();
    assert!(out.status.success());
    let docs: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let arr = docs.as_array().unwrap();
    assert_eq!(arr.len(), 1);
    assert_eq!(arr[0]["kind"], "classify");
}

#[test]
fn reports_are_deterministic() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let body = r#"{"model": {"kind": "ising", "mass": 1.0},
        "test_function": {"kind": "gaussian", "sigma": 0.5},
        "grid_ladder": [[8.0, 64], [8.0, 96]], "tolerance": 1e-3}"#;
    let c1 = write_cfg(d1.path(), body);
    let c2 = write_cfg(d2.path(), body);
    assert!(run(&["minimize"], &c1, d1.path()).status.success());
    assert!(run(&["minimize"], &c2, d2.path()).status.success());
    assert_eq!(
        std::fs::read(d1.path().join("minimize.json")).unwrap(),
        std::fs::read(d2.path().join("minimize.json")).unwrap()
    );
}

#[test]
fn flag_overrides_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), r#"{"model": {"kind": "free", "mass": 1.0}}"#);
    let out = bin()
        .args(["classify", "--theta-max", "20", "--convention", "normalized"])
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc = json(&dir.path().join("classify.json"));
    assert_eq!(doc["meta"]["theta_max"], 20.0);
    assert_eq!(doc["meta"]["convention"], "normalized");
    assert_eq!(doc["result"]["verdict"]["theta_max"], 20.0);
}

#[test]
fn malformed_config_exits_one_with_error_json() {
    let dir = tempfile::tempdir().unwrap();

    // unparsable JSON
    let cfg = write_cfg(dir.path(), "{ nope");
    let out = run(&["classify"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(!err["error"].as_str().unwrap().is_empty());
    assert_eq!(err["exit_code"], 1);

    // well-formed JSON, invalid contents
    for body in [
        r#"{"model": {"kind": "unknown", "mass": 1.0}}"#,
        r#"{"model": {"kind": "free", "mass": -1.0}}"#,
        r#"{"model": {"kind": "sinh_gordon", "mass": 1.0}}"#,
        r#"{"model": {"kind": "free", "mass": 1.0}, "polynomial": {"coeffs": [0.7, 0.7]}}"#,
        r#"{"model": {"kind": "free", "mass": 1.0}, "test_function": {"kind": "gaussian", "sigma": 0.0}}"#,
    ] {
        let cfg = write_cfg(dir.path(), body);
        let out = run(&["classify"], &cfg, dir.path());
        assert_eq!(out.status.code(), Some(1), "{body}");
        let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["exit_code"], 1, "{body}");
    }

    // missing --config
    let out = bin().arg("classify").arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
