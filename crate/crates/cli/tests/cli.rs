//! End-to-end tests of the `gmd` binary: exit codes, JSON shapes,
//! round-trips, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

use gmd_core::sim::SimReport;

fn gmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(args: &[&str]) -> serde_json::Value {
    let out = gmd(args);
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_sim_config(dir: &Path, e: f64, trials: u64) -> std::path::PathBuf {
    let path = dir.join("sim.json");
    let config = serde_json::json!({
        "inner": {"kind": "hamming74"},
        "outer": {"m": 4, "n": 15, "k": 7},
        "l": 1,
        "z": 2,
        "e": e,
        "s": 0.1,
        "thresholds": {"method": "solver"},
        "trials": trials,
        "seed": 9
    });
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    path
}

#[test]
fn thresholds_solver_example() {
    let v = stdout_json(&[
        "thresholds", "--l", "1", "--z", "2", "--e0", "1", "--s", "1", "--method", "solver",
    ]);
    let t = v["methods"][0]["thresholds"].as_array().unwrap();
    assert!((t[0].as_f64().unwrap() - 0.2).abs() < 1e-9);
    assert!((t[1].as_f64().unwrap() - 0.6).abs() < 1e-9);
    assert!(v["methods"][0]["max_abs_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn thresholds_all_methods_with_prediction() {
    let v = stdout_json(&[
        "thresholds", "--l", "2", "--z", "2", "--e0", "1", "--s", "0.5", "--method", "all",
        "--do", "9", "--ni", "7",
    ]);
    let methods: Vec<&str> = v["methods"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["method"].as_str().unwrap())
        .collect();
    assert_eq!(methods, ["solver", "paper", "minimax"]);
    // solver coefficient for l=2, z=2, d-1=8 is 96/13
    let c = v["methods"][0]["prediction"]["coefficient"].as_f64().unwrap();
    assert!((c - 96.0 / 13.0).abs() < 1e-9);
    // the printed closed form carries large residuals here
    assert!(v["methods"][1]["max_abs_residual"].as_f64().unwrap() > 1e-3);
}

#[test]
fn missing_required_flag_is_usage_error() {
    let out = gmd(&["thresholds", "--l", "1", "--e0", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--z"), "stderr should name the flag: {stderr}");
}

#[test]
fn paper_method_at_l1_is_usage_error() {
    let out = gmd(&[
        "thresholds", "--l", "1", "--z", "2", "--e0", "1", "--method", "paper",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("paper") && stderr.contains("--l"), "{stderr}");
}

#[test]
fn exponent_command_fields() {
    let v = stdout_json(&["exponent", "--e", "0.05", "--ni", "7", "--ki", "4"]);
    for key in ["e", "rate", "e0", "s", "rho_star"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["e0"].as_f64().unwrap() > 0.0);
    // above capacity: runtime failure, not usage
    let out = gmd(&["exponent", "--e", "0.4", "--ni", "7", "--ki", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn predict_command_orders_paper_forms() {
    let v = stdout_json(&[
        "predict", "--l", "2", "--z", "2", "--do", "9", "--ni", "7", "--e0", "1",
    ]);
    assert!((v["from_solver_thresholds"]["coefficient"].as_f64().unwrap() - 96.0 / 13.0).abs() < 1e-9);
    assert!((v["paper_forms"]["finite_z"]["coefficient"].as_f64().unwrap() - 9.6).abs() < 1e-9);
    assert_eq!(v["paper_forms"]["ordering_holds"], serde_json::json!(true));
    assert!((v["bmd_reference"]["coefficient"].as_f64().unwrap() - 32.0 / 5.0).abs() < 1e-9);
}

#[test]
fn enumerate_spot_value() {
    let dir = tempfile::tempdir().unwrap();
    let probs = dir.path().join("probs.json");
    std::fs::write(
        &probs,
        r#"{"p_r": 0.7, "p_c": 0.2, "p_l": 0.1, "p_over": [], "p_under": []}"#,
    )
    .unwrap();
    let v = stdout_json(&[
        "enumerate", "--probs", probs.to_str().unwrap(),
        "--no", "3", "--do", "3", "--l", "1", "--z", "1",
    ]);
    assert!((v["exact_pe"].as_f64().unwrap() - 0.132).abs() < 1e-12);
    assert!(v["dominant_pe"].as_f64().unwrap() <= v["exact_pe"].as_f64().unwrap());
}

#[test]
fn simulate_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_sim_config(dir.path(), 0.05, 3000);
    let out = gmd(&["simulate", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let report: SimReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.trials, 3000);
    let mut re_emitted = serde_json::to_string_pretty(&report).unwrap();
    re_emitted.push('\n');
    assert_eq!(text, re_emitted);
}

#[test]
fn simulate_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_sim_config(dir.path(), 0.05, 3000);
    let v = stdout_json(&[
        "simulate", "--config", config.to_str().unwrap(), "--trials", "500", "--seed", "1",
    ]);
    assert_eq!(v["trials"].as_u64(), Some(500));
}

#[test]
fn simulate_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"inner": {"kind": "hamming74"}, "outer": {"m": 4, "n": 15, "k": 7},
            "l": 1, "z": 1, "e": 0.05, "thresholds": {"method": "solver"},
            "bogus_knob": 3}"#,
    )
    .unwrap();
    let out = gmd(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_knob"));
}

#[test]
fn sweep_is_byte_deterministic_and_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("curves.csv");
    let args = [
        "sweep", "--e-from", "0.03", "--e-to", "0.05", "--points", "2",
        "--z-list", "1,2", "--trials", "2000", "--seed", "5",
        "--out", csv_path.to_str().unwrap(),
    ];
    assert!(gmd(&args).status.success());
    let first = std::fs::read(&csv_path).unwrap();
    assert!(gmd(&args).status.success());
    let second = std::fs::read(&csv_path).unwrap();
    assert_eq!(first, second, "same seed must reproduce identical bytes");

    let text = String::from_utf8(first).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 4, "header plus 2 z-values x 2 points");
    assert_eq!(lines[0], "e,z,l,method,pe_hat,ci_lo,ci_hi,pe_predicted,trials");
    // sorted by (z, e) ascending
    let keys: Vec<(usize, f64)> = lines[1..]
        .iter()
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[1].parse().unwrap(), cols[0].parse().unwrap())
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap()));
    assert_eq!(keys, sorted);

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("curves.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["outer_n"].as_u64(), Some(15));
    assert_eq!(meta["z_list"], serde_json::json!([1, 2]));
    assert!(meta["tool_version"].as_str().is_some());
}

#[test]
fn simulate_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_sim_config(dir.path(), 0.05, 2000);
    let one = gmd(&[
        "--threads", "1", "simulate", "--config", config.to_str().unwrap(),
    ]);
    let two = gmd(&[
        "--threads", "2", "simulate", "--config", config.to_str().unwrap(),
    ]);
    assert!(one.status.success() && two.status.success());
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn selftest_passes_and_reports_discrepancies() {
    let out = gmd(&["selftest"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["all_passed"], serde_json::json!(true));
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == serde_json::json!(true)));
    // the printed closed form must be flagged at l = 2, z = 2
    let entry = v["discrepancies"]
        .as_array()
        .unwrap()
        .iter()
        .find(|d| d["l"] == serde_json::json!(2) && d["z"] == serde_json::json!(2))
        .expect("l=2, z=2 entry");
    assert_eq!(entry["closed_form_fails_equalization"], serde_json::json!(true));
    assert!(entry["solver_max_abs_residual"].as_f64().unwrap() < 1e-9);
    // pass/fail lines go to stderr, one per check
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().filter(|l| l.starts_with("PASS")).count(), checks.len());
}
