//! Exit-code and determinism contract of the `asw` binary.

use std::process::Command;

fn asw(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_asw"))
        .args(args)
        .output()
        .expect("spawn asw")
}

#[test]
fn diff_set_valid_input_exits_zero() {
    let out = asw(&[
        "diff-set",
        "--params",
        r#"{"lattice":{"hyperbolic_planes":2},"t":{"diag":["1","1","3"]}}"#,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["diff"], serde_json::json!(["3"]));
}

#[test]
fn density_at_two_is_unsupported() {
    let out = asw(&[
        "density",
        "--mode",
        "count",
        "--params",
        r#"{"p":2,"lattice":{"quadratic_diag":[1,1,1]},"t":{"diag":["1"]}}"#,
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_field_is_a_schema_error() {
    let out = asw(&["nu-p", "--params", r#"{"p":3,"a1":0,"a2":1,"a3":1,"oops":true}"#]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_json_is_a_schema_error() {
    let out = asw(&["jordan", "--params", "{"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn alsw_check_tolerance_failure_exits_one() {
    // an impossible tolerance forces the residual branch
    let out = asw(&["alsw-check", "--params", r#"{"t":-1.0,"tol":1e-30}"#]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "coefficient",
        "--params",
        r#"{"lattice":{"quadratic_diag":[1,-1,-1]},"t":{"diag":["-1","-2"]},"tau_im_diag":[1.0,1.0]}"#,
    ];
    let a = asw(&args);
    let b = asw(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn acceptance_subset_prints_table() {
    let out = asw(&["acceptance", "--params", r#"{"criteria":[5]}"#]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS"), "table missing: {text}");
}
