use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_tuplevar");

fn run(args: &[&str], stdin: &str) -> Output {
    run_env(args, stdin, &[])
}

fn run_env(args: &[&str], stdin: &str, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("TUPLEVAR_")) {
        cmd.env_remove(k);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("binary starts");
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(stdin.as_bytes())
        .expect("stdin accepts the document");
    child.wait_with_output().expect("binary finishes")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn pair(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> String {
    let m = |x: [[f64; 2]; 2]| {
        x.iter()
            .map(|r| r.iter().map(|v| [*v, 0.0]).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    serde_json::json!({ "n": 2, "partition": [1, 1], "matrices": [m(a), m(b)] }).to_string()
}

const DIAG12: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 2.0]];

#[test]
fn certify_exit_codes() {
    let on = run(&["certify"], &pair(DIAG12, [[3.0, 0.0], [1.0, 4.0]]));
    assert_eq!(code(&on), 10, "{}", stderr(&on));
    assert_eq!(json(&on)["status"], "on_variety");

    // Commuting diagonal matrices share e1, so they lie on the variety too.
    let diag = run(&["certify"], &pair(DIAG12, [[3.0, 0.0], [0.0, 5.0]]));
    assert_eq!(code(&diag), 10);

    let generic = run(&["certify"], &pair(DIAG12, [[0.0, 1.0], [1.0, 0.0]]));
    assert_eq!(code(&generic), 0);
    let out = json(&generic);
    assert_eq!(out["status"], "generic");
    assert!(out["residual"].is_number() && out["scale"].is_number());
    assert_eq!(out["min_gaps"].as_array().unwrap().len(), 2);

    let jordan = run(&["certify"], &pair([[1.0, 1.0], [0.0, 1.0]], [[3.0, 0.0], [0.0, 5.0]]));
    assert_eq!(code(&jordan), 20);
}

#[test]
fn input_errors_exit_one() {
    let doc = r#"{"n": 3, "partition": [1, 1], "matrices": []}"#;
    let o = run(&["certify"], doc);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("partition must sum to n"));

    let o = run(&["certify"], "{\"n\": 2,\n \"partition\": [1,");
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    assert_eq!(code(&run(&["eval", "--which", "bogus"], "")), 1);
}

#[test]
fn input_file_and_size_cap() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.json");
    std::fs::write(&path, pair(DIAG12, [[0.0, 1.0], [1.0, 0.0]])).unwrap();
    let o = run(&["certify", "--input", path.to_str().unwrap()], "");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let capped = run(&["certify", "--input", path.to_str().unwrap(), "--size-cap", "2"], "");
    assert_eq!(code(&capped), 1);
}

#[test]
fn oracle_reports_witness() {
    let on = run(&["oracle"], &pair(DIAG12, [[3.0, 0.0], [1.0, 4.0]]));
    assert_eq!(code(&on), 10);
    let out = json(&on);
    assert!(out["min_sigma"].as_f64().unwrap() < 1e-8);
    // Both matrices contribute their eigenvector for the eigenvalue 2 and 4.
    assert_eq!(out["witness"]["choice"], serde_json::json!([[2], [2]]));

    let off = run(&["oracle"], &pair(DIAG12, [[0.0, 1.0], [1.0, 0.0]]));
    assert_eq!(code(&off), 0);
    assert!(json(&off)["min_sigma"].as_f64().unwrap() >= 0.4);

    let jordan = run(&["oracle"], &pair([[1.0, 1.0], [0.0, 1.0]], [[3.0, 0.0], [0.0, 5.0]]));
    assert_eq!(code(&jordan), 20);
    assert!(stderr(&jordan).contains("diagonalizable"));
}

#[test]
fn eval_values() {
    let o = run(&["eval", "--which", "degrees", "--partition", "1,1,1"], "");
    assert_eq!(code(&o), 0);
    let out = json(&o);
    assert_eq!(out["per_matrix"], serde_json::json!([27, 27, 27]));
    assert_eq!(out["total"], 81);

    let d = run(
        &["eval", "--which", "D", "--sub-partition", "1,1"],
        &pair(DIAG12, [[3.0, 0.0], [0.0, 5.0]]),
    );
    assert_eq!(code(&d), 0, "{}", stderr(&d));
    let v = &json(&d)["factors"][0]["value"];
    assert!((v["magnitude"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!((v["phase"].as_f64().unwrap().abs() - std::f64::consts::PI).abs() < 1e-12);

    let bad = run(
        &["eval", "--which", "D", "--sub-partition", "2,1"],
        &pair(DIAG12, [[3.0, 0.0], [0.0, 5.0]]),
    );
    assert_eq!(code(&bad), 1);

    let phat = run(&["eval", "--which", "Phat"], &pair(DIAG12, [[0.0, 1.0], [1.0, 0.0]]));
    assert_eq!(code(&phat), 0);
    assert!(json(&phat)["value"]["log10_magnitude"].is_number());
}

#[test]
fn generated_documents_pipe_through() {
    let args = ["gen", "random", "--n", "3", "--partition", "1,1,1", "--seed", "7"];
    let a = run(&args, "");
    let b = run(&args, "");
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["metadata"]["seed"], 7);

    let planted = run(&["gen", "on-variety", "--partition", "1,2", "--seed", "3"], "");
    assert_eq!(code(&planted), 0);
    let verdict = run(&["certify"], &String::from_utf8(planted.stdout).unwrap());
    assert_eq!(code(&verdict), 10, "{}", String::from_utf8_lossy(&verdict.stdout));

    let collision = run(&["gen", "collision", "--partition", "1,1", "--sub-partition", "1,1"], "");
    assert_eq!(code(&collision), 0, "{}", stderr(&collision));
    let p = run(&["eval", "--which", "P"], &String::from_utf8(collision.stdout).unwrap());
    assert_eq!(json(&p)["value"], "zero");
}

#[test]
fn gen_failures() {
    assert_eq!(code(&run(&["gen", "collision", "--partition", "1,1"], "")), 1);
    let o = run(&["gen", "random", "--n", "3", "--partition", "1,1"], "");
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("partition must sum to n"));
    // One subspace of dimension n never lies in a hyperplane.
    assert_eq!(code(&run(&["gen", "on-variety", "--partition", "2"], "")), 2);
}

#[test]
fn seed_precedence() {
    let flag = run(&["gen", "random", "--partition", "1,1", "--seed", "5"], "");
    let env = run_env(&["gen", "random", "--partition", "1,1"], "", &[("TUPLEVAR_SEED", "5")]);
    let both = run_env(
        &["gen", "random", "--partition", "1,1", "--seed", "5"],
        "",
        &[("TUPLEVAR_SEED", "9")],
    );
    let default = run(&["gen", "random", "--partition", "1,1"], "");
    assert_eq!(flag.stdout, env.stdout);
    assert_eq!(flag.stdout, both.stdout);
    assert_ne!(flag.stdout, default.stdout);
}

#[test]
fn selftest_flags() {
    let o = run(&["selftest", "--samples", "0"], "");
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("samples must be ≥ 1"));

    let o = run(&["selftest", "--max-n", "2", "--samples", "3"], "");
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 9);
}
