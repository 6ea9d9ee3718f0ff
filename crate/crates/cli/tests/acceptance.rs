//! End-to-end checks of the binary: determinism of emitted files,
//! certification of fresh and tampered summaries, sweep consistency and
//! error exit codes.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bsubgrad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsubgrad"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).expect("output file exists")
}

/// The summary with the wall-clock measurement normalized away; everything
/// else must be reproduced byte-for-byte, so the comparison happens on the
/// serialized form.
fn normalized_summary(path: &Path) -> String {
    let mut v: Value = serde_json::from_str(&read(path)).expect("valid summary JSON");
    v["wall_clock_seconds"] = Value::from(0.0);
    serde_json::to_string_pretty(&v).expect("serializable")
}

#[test]
fn criterion_8_determinism_and_certification() {
    let dir = tempfile::tempdir().unwrap();
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    let sum_a = dir.path().join("a.json");
    let sum_b = dir.path().join("b.json");
    let args = |csv: &Path, sum: &Path| {
        vec![
            "run".to_string(),
            "--problem".into(),
            "ex1".into(),
            "--n".into(),
            "50".into(),
            "--radius".into(),
            "10".into(),
            "--gamma".into(),
            "0.5".into(),
            "--oracle".into(),
            "relative:0.3".into(),
            "--iters".into(),
            "2000".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            csv.display().to_string(),
            "--summary".into(),
            sum.display().to_string(),
        ]
    };
    for (csv, sum) in [(&csv_a, &sum_a), (&csv_b, &sum_b)] {
        let out = Command::new(env!("CARGO_BIN_EXE_bsubgrad"))
            .args(args(csv, sum))
            .output()
            .unwrap();
        assert!(out.status.success(), "run failed: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(read(&csv_a), read(&csv_b), "repeated runs must emit byte-identical CSV");
    assert_eq!(
        normalized_summary(&sum_a),
        normalized_summary(&sum_b),
        "repeated runs must emit identical JSON up to the wall-clock measurement"
    );

    // fresh summary certifies cleanly
    let out = bsubgrad(&["certify", sum_a.to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(out.status.success(), "certify failed on fresh output:\n{stdout}");
    assert!(stdout.contains("[PASS]"));
    assert!(!stdout.contains("[FAIL]"));

    // single-field tampering is caught
    for field in ["s1-up", "f_x_hat"] {
        let mut v: Value = serde_json::from_str(&read(&sum_a)).unwrap();
        match field {
            "s1-up" => {
                let s1 = v["aggregates"]["s1"].as_f64().unwrap();
                v["aggregates"]["s1"] = Value::from(s1 * 1.001);
            }
            _ => {
                let f = v["f_x_hat"].as_f64().unwrap();
                v["f_x_hat"] = Value::from(f + 1e-6);
            }
        }
        let tampered = dir.path().join("tampered.json");
        std::fs::write(&tampered, serde_json::to_string_pretty(&v).unwrap()).unwrap();
        let out = bsubgrad(&["certify", tampered.to_str().unwrap()]);
        let stdout = String::from_utf8_lossy(&out.stdout).to_string();
        assert_eq!(out.status.code(), Some(1), "tampered {field} must fail:\n{stdout}");
        assert!(stdout.contains("[FAIL] aggregate-checksum"), "{stdout}");
    }

    println!("[PASS] criterion 8: byte-identical reruns; certify passes fresh, fails tampered");
}

#[test]
fn sweep_cells_match_individual_runs() {
    let dir = tempfile::tempdir().unwrap();
    let combined = dir.path().join("sweep.csv");
    let summaries = dir.path().join("cells");
    let out = Command::new(env!("CARGO_BIN_EXE_bsubgrad"))
        .env("BSUBGRAD_WORKERS", "2")
        .args([
            "sweep",
            "--problem",
            "ex1",
            "--n",
            "20",
            "--iters",
            "500",
            "--seed",
            "3",
            "--alphas",
            "0.5",
            "--deltas",
            "0.1",
            "--seeds",
            "3,4",
            "--out",
            combined.to_str().unwrap(),
            "--summary-dir",
            summaries.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = read(&combined);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("model,value,seed,k,"));
    // 1 exact baseline + 2 relative + 2 absolute cells
    for label in ["exact,,3,", "relative,0.5,3,", "relative,0.5,4,", "absolute,0.1,3,", "absolute,0.1,4,"] {
        assert!(text.lines().any(|l| l.starts_with(label)), "missing cell rows for {label}");
    }

    // a sweep cell is the same run cmd_run would execute
    let csv = dir.path().join("solo.csv");
    let sum = dir.path().join("solo.json");
    let out = bsubgrad(&[
        "run",
        "--problem",
        "ex1",
        "--n",
        "20",
        "--iters",
        "500",
        "--oracle",
        "relative:0.5",
        "--seed",
        "4",
        "--out",
        csv.to_str().unwrap(),
        "--summary",
        sum.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let cell = normalized_summary(&summaries.join("summary_relative_0.5_4.json"));
    assert_eq!(normalized_summary(&sum), cell, "sweep cell differs from the equivalent run");

    let solo = read(&csv);
    let solo_rows: Vec<&str> = solo.lines().skip(1).collect();
    let cell_rows: Vec<String> = text
        .lines()
        .filter(|l| l.starts_with("relative,0.5,4,"))
        .map(|l| l["relative,0.5,4,".len()..].to_string())
        .collect();
    assert_eq!(solo_rows, cell_rows, "combined CSV rows differ from the equivalent run");
}

#[test]
fn config_file_precedence_and_echo() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.conf");
    std::fs::write(&cfg, "# experiment\nproblem = ex1\nn = 30\niters = 400\nseed = 11\n").unwrap();
    let sum = dir.path().join("s.json");
    let out = bsubgrad(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "40",
        "--summary",
        sum.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&read(&sum)).unwrap();
    assert_eq!(v["config"]["n"], Value::from(40), "flag must override the config file");
    assert_eq!(v["config"]["iters"], Value::from(400));
    assert_eq!(v["config"]["seed"], Value::from(11));
}

#[test]
fn error_exit_codes() {
    let out = bsubgrad(&["run", "--oracle", "relative:1.5", "--iters", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = bsubgrad(&["sweep", "--seeds", "1"]);
    assert_eq!(out.status.code(), Some(1), "empty value grids must be rejected");

    let out = bsubgrad(&["sweep", "--alphas", "0.1"]);
    assert_eq!(out.status.code(), Some(1), "missing seeds must be rejected");

    let out = bsubgrad(&["certify", "/nonexistent/summary.json"]);
    assert_eq!(out.status.code(), Some(1));

    let out = bsubgrad(&["list-problems"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(stdout.contains("ex1"));
    assert!(stdout.contains("ex2"));
}

#[test]
fn zero_delta_run_certifies_reduction() {
    let dir = tempfile::tempdir().unwrap();
    let sum = dir.path().join("d0.json");
    let out = bsubgrad(&[
        "run",
        "--problem",
        "ex1",
        "--n",
        "20",
        "--iters",
        "300",
        "--oracle",
        "absolute:0",
        "--summary",
        sum.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = bsubgrad(&["certify", sum.to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("[PASS] reduction-consistency"), "{stdout}");
}
