//! Black-box tests of the installed binary: exit codes, output files, and
//! argument validation.

use std::path::Path;
use std::process::Command;

fn lpball() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lpball"))
}

#[test]
fn recover_sweep_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = lpball()
        .args([
            "recover-sweep",
            "--n",
            "64",
            "--d",
            "4",
            "--m",
            "32,48,64",
            "--methods",
            "0.5",
            "--trials",
            "5",
            "--seed",
            "7",
            "--max-iter",
            "2000",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method,p,param,metric,value,trials,seed");
    // success_rate and mean_iterations per m value.
    assert_eq!(lines.len(), 1 + 3 * 2);
    assert!(lines[1..].iter().all(|l| l.starts_with("ir1b,0.5,")));
}

#[test]
fn solve_reports_convergence_on_identity_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("a.csv");
    let rhs = dir.path().join("y.csv");
    let out = dir.path().join("x.csv");
    std::fs::write(&matrix, "1,0\n0,1\n").unwrap();
    std::fs::write(&rhs, "2\n0\n").unwrap();
    let output = lpball()
        .args(["solve", "--objective", "ls", "--p", "0.5", "--r", "1", "--tol", "1e-9"])
        .arg("--matrix")
        .arg(&matrix)
        .arg("--rhs")
        .arg(&rhs)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("status=Converged"), "stdout: {stdout}");
    assert!(stdout.contains("residual="), "stdout: {stdout}");
    let x: Vec<f64> = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    // Projection of the distance-to-[2,0] problem onto the p=1/2 unit ball.
    assert!((x[0] - 1.0).abs() < 1e-5, "x = {x:?}");
    assert!(x[1].abs() < 1e-10, "x = {x:?}");
}

#[test]
fn invalid_exponent_is_a_usage_error() {
    let output = lpball()
        .args([
            "solve",
            "--objective",
            "ls",
            "--p",
            "1.5",
            "--r",
            "1",
            "--matrix",
            "a.csv",
            "--rhs",
            "y.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("p"), "stderr: {stderr}");
    assert!(stderr.contains("(0,1)"), "stderr: {stderr}");
}

#[test]
fn missing_input_file_is_a_usage_error() {
    let output = lpball()
        .args([
            "solve",
            "--objective",
            "ls",
            "--p",
            "0.5",
            "--r",
            "1",
            "--matrix",
            "does_not_exist.csv",
            "--rhs",
            "y.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn project_prints_norm_summary() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("v.csv");
    std::fs::write(&input, "3\n0\n").unwrap();
    let output = lpball()
        .args(["project", "--r", "1", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("l1_norm=1"), "stdout: {stdout}");
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "p = 0.7\nr = 1\nmax_iter = 50\n").unwrap();
    let matrix = dir.path().join("a.csv");
    let rhs = dir.path().join("y.csv");
    std::fs::write(&matrix, "1,0\n0,1\n").unwrap();
    std::fs::write(&rhs, "2\n0\n").unwrap();
    // The config alone is valid; an explicit bad flag must still lose.
    let output = lpball()
        .args(["solve", "--objective", "ls", "--p", "1.5", "--config"])
        .arg(&cfg)
        .arg("--matrix")
        .arg(&matrix)
        .arg("--rhs")
        .arg(&rhs)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));

    let output = lpball()
        .args(["solve", "--objective", "ls", "--config"])
        .arg(&cfg)
        .arg("--matrix")
        .arg(&matrix)
        .arg("--rhs")
        .arg(&rhs)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
}

#[test]
fn unknown_config_key_is_fatal_and_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "p = 0.5\nr = 1\nbogus_knob = 3\n").unwrap();
    let output = lpball()
        .args(["solve", "--objective", "ls", "--config"])
        .arg(&cfg)
        .args(["--matrix", "a.csv", "--rhs", "y.csv"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("bogus_knob"), "stderr: {stderr}");
}

#[test]
fn certify_emits_json_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("a.csv");
    let rhs = dir.path().join("y.csv");
    let point = dir.path().join("x.csv");
    let out = dir.path().join("cert.json");
    std::fs::write(&matrix, "1,0\n0,1\n").unwrap();
    std::fs::write(&rhs, "2\n0\n").unwrap();
    std::fs::write(&point, "1\n0\n").unwrap();
    let output = lpball()
        .args(["certify", "--objective", "ls", "--p", "0.5", "--r", "1"])
        .arg("--matrix")
        .arg(&matrix)
        .arg("--rhs")
        .arg(&rhs)
        .arg("--point")
        .arg(&point)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(cert["case"], "Boundary");
    let lambda = cert["lambda"].as_f64().unwrap();
    assert!((lambda - 2.0).abs() < 1e-8, "lambda = {lambda}");
}

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let status = lpball().arg(flag).status().unwrap();
        assert!(status.success(), "{flag}");
    }
    assert_eq!(
        lpball().arg("--no-such-flag").status().unwrap().code(),
        Some(1)
    );
}

#[test]
fn logistic_sweep_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("tiny.csv");
    // Linearly separable 8-sample, 2-feature toy set.
    let mut rows = String::new();
    for i in 0..8 {
        let x = (i as f64) - 3.5;
        rows.push_str(&format!("{x},{},{}\n", -x, if x >= 0.0 { 1 } else { 0 }));
    }
    std::fs::write(&data, rows).unwrap();
    let out = dir.path().join("acc.json");
    let status = lpball()
        .args([
            "logistic-sweep",
            "--r-grid",
            "1,2",
            "--p-list",
            "0.5",
            "--test-frac",
            "0.25",
            "--seed",
            "3",
            "--max-iter",
            "500",
            "--format",
            "json",
            "--data",
        ])
        .arg(&data)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let rows: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert_eq!(rows[0]["metric"], "test_accuracy");
}

#[test]
fn bundled_dataset_is_present_and_well_formed() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/breast_cancer.csv");
    let text = std::fs::read_to_string(path).unwrap();
    // Header plus 569 rows of 30 features and a label.
    assert_eq!(text.lines().count(), 570);
    assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 31);
}
