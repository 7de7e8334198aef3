use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn gda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gda"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("gda-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn bruhat_of_identity() {
    let o = gda(&[
        "bruhat",
        "--algebra",
        &path("quaternion13.toml"),
        "--matrix",
        &path("identity2.json"),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = stdout_json(&o);
    assert_eq!(r["command"], "bruhat");
    assert_eq!(r["outputs"]["strict"], true);
    assert_eq!(r["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn det_and_nrd_of_identity() {
    let o = gda(&[
        "det",
        "--algebra",
        &path("quaternion13.toml"),
        "--matrix",
        &path("identity2.json"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["outputs"]["in_kernel"], true);
    let o = gda(&[
        "nrd",
        "--algebra",
        &path("quaternion13.toml"),
        "--matrix",
        &path("identity2.json"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout_json(&o);
    assert_eq!(r["outputs"]["nrd_s"], "1");
    assert_eq!(r["outputs"]["in_sh1"], true);
}

#[test]
fn sk_report_for_two_symbols() {
    let o = gda(&["sk", "--algebra", &path("twosym13.toml"), "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = &stdout_json(&o)["outputs"];
    assert_eq!(out["sk_h"]["order"], 4);
    assert_eq!(out["sk_e"]["order"], 2);
    assert_eq!(out["kernel"]["order"], 2);
    assert_eq!(out["agrees"], true);
}

#[test]
fn sk_of_shifted_fixture() {
    let o = gda(&["sk", "--algebra", &path("shifted_m7.toml")]);
    assert_eq!(o.status.code(), Some(0));
    let out = &stdout_json(&o)["outputs"];
    assert_eq!(out["n"], 2);
    assert_eq!(out["sk_h"]["order"], 4);
    assert_eq!(out["agrees"], true);
}

#[test]
fn singular_matrix_exits_one() {
    let zero = scratch("zero.json", r#"{"entries": [[[], []], [[], []]]}"#);
    let o = gda(&["bruhat", "--algebra", &path("gf5.toml"), "--matrix", &zero]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "Singular");
}

#[test]
fn bad_toml_exits_two_with_position() {
    let bad = scratch("bad.toml", "ambient_rank = = 2\n");
    let o = gda(&["sk", "--algebra", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["message"].as_str().unwrap().contains("line 1"), "{err}");
}

#[test]
fn missing_file_exits_two() {
    let o = gda(&["sk", "--algebra", "/nonexistent/spec.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let o = gda(&["verify", "--suite", "sk", "--seed", "7"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let r = stdout_json(&o);
    assert_eq!(r["outputs"]["ok"], true);
    assert_eq!(r["outputs"]["suites"]["sk"]["failed"], 0);
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let args = ["sk", "--algebra", &path("quaternion13.toml"), "--n", "2"];
    let (a, b) = (stdout_json(&gda(&args)), stdout_json(&gda(&args)));
    assert_eq!(a["outputs"], b["outputs"]);
    assert_eq!(a["inputs_digest"], b["inputs_digest"]);
    let other = stdout_json(&gda(&[
        "sk",
        "--algebra",
        &path("quaternion13.toml"),
        "--n",
        "3",
    ]));
    assert_ne!(a["inputs_digest"], other["inputs_digest"]);
}
