use std::collections::BTreeMap;
use std::process::Command;

use elliptic_ruijsenaars::cli::{
    run_cli, run_suite, CheckRecord, Report, Suite, SuiteConfig, EXIT_ERROR, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_PASS,
};
use elliptic_ruijsenaars::shiftalg::Verdict;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ruijs").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json_of(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--json", "-"]);
    let (code, out, err) = run(&full);
    assert!(err.is_empty(), "{err}");
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn default_run_passes() {
    let (code, out, _) = run(&["verify"]);
    assert_eq!(code, EXIT_PASS, "{out}");
    assert!(out.contains(" 0 failed"));
    assert!(!out.contains("FAIL "));
}

#[test]
fn unreachable_tolerance_fails() {
    let (code, out, _) = run(&["verify", "--suite", "commutativity", "--tol", "1e-30"]);
    assert_eq!(code, EXIT_FAIL);
    assert!(out.contains("FAIL"));
}

#[test]
fn single_identity_dispatch() {
    let (code, v) = json_of(&["verify", "--identity", "rsi", "--n", "4", "--k", "2"]);
    assert_eq!(code, EXIT_PASS);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["name"], "rsi");
    assert_eq!(checks[0]["params"]["n"], 4);
    assert_eq!(checks[0]["params"]["k"], 2);
    assert!(checks[0]["max_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn config_errors_exit_three() {
    assert_eq!(run(&["verify", "--tol", "2"]).0, EXIT_ERROR);
    assert_eq!(run(&["verify", "--variant", "parabolic"]).0, EXIT_ERROR);
    assert_eq!(run(&["verify", "--samples", "0"]).0, EXIT_ERROR);
    assert_eq!(run(&["verify", "--identity", "nonsense"]).0, EXIT_ERROR);
    assert_eq!(run(&["verify", "--identity", "kernel_multiplicative", "--variant", "rational"]).0, EXIT_ERROR);
    let (code, _, err) = run(&["verify", "--config", "/nonexistent/ruijs.json"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("cannot read"));
}

#[test]
fn json_is_byte_identical_across_runs() {
    let args = ["verify", "--suite", "sources", "--n", "3", "--json", "-"];
    let (_, a, _) = run(&args);
    let (_, b, _) = run(&args);
    assert_eq!(a, b);
    assert!(a.ends_with('\n'));
    let (_, c, _) = run(&["verify", "--suite", "sources", "--n", "3", "--seed", "7", "--json", "-"]);
    assert_ne!(a, c);
}

#[test]
fn report_round_trips_through_json() {
    let config = SuiteConfig { samples: 6, ..SuiteConfig::default() };
    let report = run_suite(&config, Suite::Transforms).unwrap();
    let text = report.to_json();
    let back: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.to_json(), text);
}

#[test]
fn report_embeds_config_and_seed() {
    let (_, v) = json_of(&["verify", "--suite", "wronski", "--seed", "12345", "--variant", "trig"]);
    assert_eq!(v["seed"], 12345);
    assert_eq!(v["variant"], "trigonometric");
    assert_eq!(v["config"]["seed"], 12345);
    let delta = v["config"]["delta"].as_array().unwrap();
    assert_eq!(delta.len(), 2);
    assert!(v["library"].is_string() && v["version"].is_string());
    for c in v["checks"].as_array().unwrap() {
        for field in ["name", "params", "samples", "max_residual", "median_residual", "verdict"] {
            assert!(c.get(field).is_some(), "{field}");
        }
    }
}

#[test]
fn empty_and_inconclusive_reports() {
    let config = SuiteConfig::default();
    let empty = Report::new(&config, vec![]);
    assert_eq!(empty.exit_code(), EXIT_PASS);
    let v: Value = serde_json::from_str(&empty.to_json()).unwrap();
    assert_eq!(v["summary"]["total"], 0);

    let record = |verdict| CheckRecord {
        name: "x".into(),
        params: BTreeMap::new(),
        samples: 1,
        max_residual: None,
        median_residual: None,
        tolerance: None,
        retries: 0,
        verdict,
        error: None,
    };
    assert_eq!(Report::new(&config, vec![record(Verdict::Pass), record(Verdict::Inconclusive)]).exit_code(), EXIT_INCONCLUSIVE);
    assert_eq!(Report::new(&config, vec![record(Verdict::Inconclusive), record(Verdict::Fail)]).exit_code(), EXIT_FAIL);
}

#[test]
fn config_file_from_env_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"variant": "rational", "samples": 3, "m": 2}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ruijs"))
        .args(["verify", "--suite", "poincare", "--samples", "4", "--json", "-"])
        .env("RUIJS_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_PASS), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["variant"], "rational");
    assert_eq!(v["config"]["samples"], 4);
    assert_eq!(v["config"]["m"], 2);

    std::fs::write(&path, r#"{"smaples": 3}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ruijs"))
        .args(["verify", "--suite", "poincare"])
        .env("RUIJS_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
}

#[test]
fn json_file_output_keeps_text_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, out, _) = run(&["verify", "--suite", "kernel", "--json", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("kernel_additive"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["summary"]["passed"].as_u64().unwrap() > 0);
}
