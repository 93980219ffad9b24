//! End-to-end tests of the `gfspec` binary: exit codes, report shape,
//! determinism of repeated invocations, and the side-car CSV files.

use std::process::{Command, Output};

use serde_json::Value;

fn gfspec(args: &[&str], out_dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfspec"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .expect("binary should start")
}

fn gfspec_env(args: &[&str], out_dir: &std::path::Path, key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfspec"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .env(key, value)
        .output()
        .expect("binary should start")
}

fn report(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout should be a JSON report: {e}\nstdout: {}\nstderr: {}",
            String::from_utf8_lossy(&output.stdout),
            String::from_utf8_lossy(&output.stderr)
        )
    })
}

/// Report content with the wall-clock field removed; everything that remains
/// must be reproducible.
fn stable_content(output: &Output) -> Value {
    let mut value = report(output);
    let map = value.as_object_mut().expect("report is an object");
    assert!(map.remove("wall_ms").is_some(), "report carries wall_ms");
    value
}

#[test]
fn spectral_pass_exits_zero_with_v1_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = gfspec(
        &["spectral", "--base", "s1:64", "--expr", "cos(x1)"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], "v1");
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["failures"].as_array().unwrap().len(), 0);
    assert_eq!(r["results"]["c_plus"].as_f64().unwrap(), 1.0);
    assert_eq!(r["results"]["c_minus"].as_f64().unwrap(), -1.0);
    assert_eq!(r["results"]["gamma"].as_f64().unwrap(), 2.0);
}

#[test]
fn quartic_fiber_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = gfspec(
        &[
            "spectral",
            "--base",
            "point",
            "--fiber",
            "1:513:4",
            "--expr",
            "xi1^4-2*xi1^2",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let gamma = r["results"]["gamma"].as_f64().unwrap();
    let beta = r["results"]["beta"].as_f64().unwrap();
    assert!(gamma.abs() <= 0.02, "gamma {gamma} should be near 0");
    assert!((beta - 1.0).abs() <= 0.02, "beta {beta} should be near 1");
}

#[test]
fn failed_assertion_exits_one_with_failures() {
    // The double-well fiber field has beta = 1 but gamma = 0, so the
    // depth-vs-gap comparison must fail and drive the exit code to 1.
    let dir = tempfile::tempdir().unwrap();
    let out = gfspec(
        &[
            "ks-check",
            "--base",
            "point",
            "--fiber",
            "1:513:4",
            "--expr",
            "xi1^4-2*xi1^2",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["verdict"], "fail");
    assert_eq!(r["results"]["holds"], Value::Bool(false));
    assert!(!r["failures"].as_array().unwrap().is_empty());
}

#[test]
fn unknown_variable_exits_two_with_offset() {
    let dir = tempfile::tempdir().unwrap();
    let out = gfspec(
        &["spectral", "--base", "s1:32", "--expr", "cos(y)"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty(), "input errors must not emit a report");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("offset 4"),
        "stderr should point at the bad identifier: {stderr}"
    );
}

#[test]
fn malformed_grid_spec_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = gfspec(
        &["spectral", "--base", "t9:banana", "--expr", "cos(x1)"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn repeated_invocation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "reduce-direct",
        "--base",
        "t2:6x6",
        "--expr1",
        "cos(x1)+0.5*sin(x2)",
        "--expr2",
        "0.3*cos(x1+x2)",
        "--seed",
        "42",
    ];
    let first = gfspec(&args, dir.path());
    let second = gfspec(&args, dir.path());
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(stable_content(&first), stable_content(&second));
}

#[test]
fn fuzz_report_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["fuzz", "--check", "oscillation", "--trials", "4", "--seed", "9"];
    let serial = gfspec_env(&args, dir.path(), "GFSPEC_THREADS", "1");
    let pooled = gfspec_env(&args, dir.path(), "GFSPEC_THREADS", "3");
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(pooled.status.code(), Some(0));
    assert_eq!(stable_content(&serial), stable_content(&pooled));
    let r = report(&serial);
    assert_eq!(r["results"]["passed"].as_u64(), Some(4));
    assert_eq!(r["results"]["failed"].as_u64(), Some(0));
}

#[test]
fn barcode_writes_csv_with_header_and_infinite_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = gfspec(
        &["barcode", "--base", "s1:64", "--expr", "cos(x1)"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let csv_path = r["csv_files"][0].as_str().expect("barcode csv listed");
    let text = std::fs::read_to_string(csv_path).expect("csv exists");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("degree,birth,death"));
    assert!(
        text.lines().skip(1).any(|l| l.ends_with(",inf")),
        "a circle has essential classes, so some bar never dies: {text}"
    );
    // One essential class per degree of the circle.
    assert_eq!(r["results"]["infinite_bars"].as_u64(), Some(2));
}

#[test]
fn shift_sweep_ratio_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = gfspec(
        &["shift-test", "--base", "s1:128", "--expr", "cos(x1)"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let ratio = r["results"]["ratio"].as_f64().unwrap();
    assert!(
        (ratio - 2.0).abs() <= 1e-9,
        "pure cosine halves exactly under the antipodal shift: {ratio}"
    );
    let csv_path = r["csv_files"][0].as_str().unwrap();
    let text = std::fs::read_to_string(csv_path).unwrap();
    assert_eq!(text.lines().next(), Some("theta,gamma_pair"));
    assert!(text.lines().count() > 64, "sweep should cover the grid");
}

#[test]
fn strict_mode_zero_tolerance_on_graph_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = gfspec(
        &[
            "reduce-direct",
            "--base",
            "t2:6x6",
            "--expr1",
            "cos(x1)",
            "--expr2",
            "0",
            "--strict",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["strict"], Value::Bool(true));
    assert_eq!(r["verdict"], "pass");
}

#[test]
fn algebra_check_exit_code_contract() {
    let dir = tempfile::tempdir().unwrap();
    let size = gfspec::SystemSize {
        indices: 2,
        levels: 4,
        max_extra_bars: 2,
    };
    let sys = gfspec::random_system(7, &size).unwrap();
    sys.validate().unwrap();

    let ok_path = dir.path().join("sys_ok.json");
    std::fs::write(&ok_path, gfspec::to_json(&sys).unwrap()).unwrap();
    let out = gfspec(&["algebra-check", "--file", ok_path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["valid"], Value::Bool(true));
    assert_eq!(r["verdict"], "pass");

    let (broken, _kind) = gfspec::mutate_system(&sys, 11).unwrap();
    let bad_path = dir.path().join("sys_bad.json");
    std::fs::write(&bad_path, gfspec::to_json(&broken).unwrap()).unwrap();
    let out = gfspec(&["algebra-check", "--file", bad_path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1), "axiom violations are check failures");
    let r = report(&out);
    assert_eq!(r["results"]["valid"], Value::Bool(false));
    assert!(!r["failures"].as_array().unwrap().is_empty());

    let garbage_path = dir.path().join("garbage.json");
    std::fs::write(&garbage_path, "not json at all").unwrap();
    let out = gfspec(
        &["algebra-check", "--file", garbage_path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "unreadable input is a usage error");
    assert!(out.stdout.is_empty());
}

#[test]
fn pullback_degree_two_doubles_nothing_but_scales_classes() {
    let dir = tempfile::tempdir().unwrap();
    let out = gfspec(
        &[
            "pullback",
            "--base",
            "s1:64",
            "--expr",
            "cos(x1)",
            "--winding",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["holds_equality"], Value::Bool(true));
    assert_eq!(
        r["results"]["gamma_source"].as_f64().unwrap(),
        r["results"]["gamma_pulled"].as_f64().unwrap()
    );
}
