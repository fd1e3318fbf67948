//! End-to-end tests of the `lambda-transfer` binary: exit codes, JSON
//! output shape, and determinism.

use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lambda-transfer"));
    // Isolate the cache so tests never touch a shared directory.
    let dir = std::env::temp_dir().join(format!("lt-cli-test-{}", std::process::id()));
    c.env("LAMBDA_TRANSFER_CACHE", dir);
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn binary")
}

#[test]
fn transfer_success_exit_zero() {
    let out = run(&["transfer", "19a1", "817b1", "--p", "5", "--d", "51", "--offline"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("lambda(f2) = 2"), "missing result in: {text}");
    assert!(text.contains("outcome: Success"));
}

#[test]
fn transfer_json_schema_and_content() {
    let out = run(&[
        "transfer", "19a1", "817b1", "--p", "5", "--d", "51", "--offline", "--emit", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(v["schema"], "lambda-transfer/1");
    assert_eq!(v["transfer"]["lambda_f1"], 0);
    assert_eq!(v["transfer"]["lambda_f2"], 2);
    assert_eq!(v["outcome"], "success");
    assert_eq!(v["congruence"]["sturm_bound"], 146);
}

#[test]
fn transfer_missing_certificate_inconclusive_exit_three() {
    // 817b1's bundled certificate omits rank_one and sha_p_trivial, so the
    // lambda(f1) = 0 checklist cannot run with it as the source form.
    let out = run(&["transfer", "817b1", "19a1", "--p", "5", "--d", "51", "--offline"]);
    assert_eq!(out.status.code(), Some(3), "stdout: {}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("outcome: Inconclusive"), "got: {text}");
}

#[test]
fn transfer_hypothesis_failure_exit_one() {
    // p = 3 fails admissibility (p | 6).
    let out = run(&["transfer", "19a1", "817b1", "--p", "3", "--d", "51", "--offline"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("outcome: HypothesisFailure"), "got: {text}");
}

#[test]
fn bad_input_exit_two() {
    let out = run(&["transfer", "nosuchlabel", "817b1", "--offline"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let out = run(&["transfer", "19a1", "817b1", "--p", "4", "--offline"]);
    assert_eq!(out.status.code(), Some(2), "non-prime p must be an input error");
}

#[test]
fn json_runs_byte_identical() {
    let args = [
        "transfer", "19a1", "817b1", "--p", "5", "--d", "51", "--offline", "--emit", "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn inspect_and_euler_and_brink() {
    let out = run(&["inspect", "19a1", "--offline", "--emit", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["form"]["level"], "19");
    assert_eq!(v["form"]["a_p"], "3");

    let out = run(&["euler", "817b1", "--ell", "43", "--offline", "--emit", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["d_ell"], 0);
    assert_eq!(v["kind"], "bad_multiplicative");

    let out = run(&["brink", "--ell", "43", "--p", "5", "--d", "51", "--emit", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["bstar"], "-952105");
    assert_eq!(v["result"]["s_ell"], 1);
}

#[test]
fn congruent_pass_and_verify_inconclusive() {
    let out = run(&["congruent", "19a1", "817b1", "--p", "5", "--offline", "--emit", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["verdict"], "pass");

    let out = run(&["verify", "817b1", "--p", "5", "--d", "51", "--offline"]);
    assert_eq!(out.status.code(), Some(3), "incomplete certificate is inconclusive");
}
