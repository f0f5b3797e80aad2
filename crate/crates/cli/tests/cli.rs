use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pisano(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pisano"))
        .args(args)
        .env_remove("PISANO_CHECKPOINT_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Runs with `--json` and parses the single document on stdout.
fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = pisano(&full);
    let text = stdout(&out);
    assert_eq!(
        text.lines().count(),
        1,
        "one document expected, got {text:?}"
    );
    (code(&out), serde_json::from_str(&text).unwrap())
}

fn fib_by_addition(n: usize) -> num_bigint::BigUint {
    let (mut a, mut b) = (
        num_bigint::BigUint::from(0u32),
        num_bigint::BigUint::from(1u32),
    );
    for _ in 0..n {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

#[test]
fn fib_exact_and_modular() {
    let out = pisano(&["fib", "24"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "46368");
    assert_eq!(stdout(&pisano(&["fib", "0"])).trim(), "0");

    let (c, doc) = json(&["fib", "100", "--mod", "1000000007"]);
    assert_eq!(c, 0);
    assert_eq!(doc["command"], "fib");
    let want = fib_by_addition(100) % num_bigint::BigUint::from(1_000_000_007u64);
    assert_eq!(
        doc["output"]["value"].as_u64().unwrap().to_string(),
        want.to_string()
    );
}

#[test]
fn profile_small_moduli() {
    for (m, gamma, alpha, upsilon) in [(5, 20, 5, 4), (2, 3, 3, 1), (10, 60, 15, 4)] {
        let (c, doc) = json(&["profile", &m.to_string()]);
        assert_eq!(c, 0);
        let out = &doc["output"];
        assert_eq!(out["gamma"], gamma, "m = {m}");
        assert_eq!(out["alpha"], alpha, "m = {m}");
        assert_eq!(out["upsilon"], upsilon, "m = {m}");
    }
}

#[test]
fn factor_output() {
    let (c, doc) = json(&["factor", "360"]);
    assert_eq!(c, 0);
    assert_eq!(
        doc["output"]["factors"],
        serde_json::json!([
            {"p": 2, "e": 3}, {"p": 3, "e": 2}, {"p": 5, "e": 1}
        ])
    );
}

#[test]
fn good_single_values() {
    let (c, doc) = json(&["good", "5"]);
    assert_eq!(c, 0);
    assert_eq!(doc["output"]["is_good"], true);
    let (c, doc) = json(&["good", "12"]);
    assert_eq!(c, 0);
    assert_eq!(doc["output"]["is_good"], false);
    let (c, doc) = json(&["good", "6", "--method", "fast"]);
    assert_eq!(c, 0);
    assert_eq!(doc["output"]["is_good"], true);
}

#[test]
fn good_range_has_no_disagreements() {
    let (c, doc) = json(&["good", "--range", "3", "999", "--method", "both"]);
    assert_eq!(c, 0);
    assert_eq!(doc["output"]["disagreements"], serde_json::json!([]));
    assert_eq!(doc["output"]["reports"].as_array().unwrap().len(), 997);
}

#[test]
fn prime_report() {
    let (c, doc) = json(&["prime", "7"]);
    assert_eq!(c, 0);
    assert_eq!(doc["output"]["gamma"], 16);
    assert_eq!(doc["output"]["wss"]["is_wss"], false);
    assert_eq!(code(&pisano(&["prime", "9"])), 1);
}

#[test]
fn self_square_listing() {
    let (c, doc) = json(&["self-square", "--max", "1000"]);
    assert_eq!(c, 0);
    assert_eq!(doc["output"]["moduli"], serde_json::json!([6, 12]));
    let (_, doc) = json(&["self-square", "5"]);
    assert_eq!(doc["output"]["divisible"], false);
}

fn scan(dir: &Path, extra: &[&str]) -> (i32, Value) {
    let cp = dir.join("cp.json");
    let out = dir.join("out.jsonl");
    let mut args = vec![
        "wss-scan",
        "--from",
        "2",
        "--to",
        "50000",
        "--block-size",
        "2000",
        "--checkpoint",
        cp.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    json(&args)
}

#[test]
fn wss_scan_singleton_range() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let (c, doc) = json(&[
        "wss-scan",
        "--from",
        "11",
        "--to",
        "11",
        "--checkpoint",
        cp.to_str().unwrap(),
    ]);
    assert_eq!(c, 0);
    assert_eq!(doc["output"]["primes_tested"], 1);
    assert_eq!(doc["output"]["checkpoint"]["last_completed"], 11);
}

#[test]
fn wss_scan_resume_is_deterministic() {
    let whole = tempfile::tempdir().unwrap();
    let (c, reference) = scan(whole.path(), &["--jobs", "2"]);
    assert_eq!(c, 0);
    assert_eq!(reference["output"]["complete"], true);

    let split = tempfile::tempdir().unwrap();
    let (c, partial) = scan(split.path(), &["--jobs", "1", "--max-blocks", "7"]);
    assert_eq!(c, 0);
    assert_eq!(partial["output"]["complete"], false);
    let (c, resumed) = scan(split.path(), &["--jobs", "3"]);
    assert_eq!(c, 0);
    assert_eq!(resumed["output"]["resumed"], true);

    let strip = |v: &Value| {
        let mut v = v["output"]["checkpoint"].clone();
        v["wall_time_seconds"] = Value::from(0.0);
        v
    };
    assert_eq!(strip(&reference), strip(&resumed));
    let read = |d: &Path| std::fs::read_to_string(d.join("out.jsonl")).unwrap();
    assert_eq!(read(whole.path()), read(split.path()));
}

#[test]
fn wss_scan_default_checkpoint_dir_from_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_pisano"))
        .args(["wss-scan", "--from", "2", "--to", "100"])
        .env("PISANO_CHECKPOINT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("wss-2-100.json").exists());
}

#[test]
fn bad_checkpoint_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    std::fs::write(&cp, "not json").unwrap();
    let (c, doc) = json(&[
        "wss-scan",
        "--from",
        "2",
        "--to",
        "100",
        "--checkpoint",
        cp.to_str().unwrap(),
    ]);
    assert_eq!(c, 2);
    assert_eq!(doc["output"]["exit_code"], 2);
}

#[test]
fn verify_suites() {
    assert_eq!(
        code(&pisano(&["verify", "--suite", "pisano", "--max", "2000"])),
        0
    );
    assert_eq!(
        code(&pisano(&["verify", "--suite", "wss", "--max", "2000"])),
        0
    );
    assert_eq!(
        code(&pisano(&[
            "verify",
            "--suite",
            "identities",
            "--max",
            "2000"
        ])),
        0
    );
    // Even good numbers exist (6 is the first), so this suite reports a failure.
    let (c, doc) = json(&["verify", "--suite", "classify", "--max", "2000"]);
    assert_eq!(c, 4);
    let failing: Vec<&str> = doc["output"]["properties"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["passed"] == false)
        .map(|p| p["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["even_never_good"]);
}

#[test]
fn usage_and_domain_errors_exit_1() {
    assert_eq!(code(&pisano(&["fib"])), 1);
    assert_eq!(code(&pisano(&["no-such-command"])), 1);
    assert_eq!(code(&pisano(&["good", "9", "--method", "bogus"])), 1);
    let (c, doc) = json(&["profile", "1"]);
    assert_eq!(c, 1);
    assert!(doc["output"]["error"].is_string());
}
