use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn welding(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_welding"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn extend_writes_outputs_and_honours_grid_override() {
    let tmp = tempfile::tempdir().unwrap();
    let out = welding(&["extend", "--grid", "12"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["extend.json", "field.csv", "profile.csv"] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
    let field = std::fs::read_to_string(tmp.path().join("field.csv")).unwrap();
    assert_eq!(field.lines().count(), 1 + 12 * 12);
    let json = read_json(&tmp.path().join("extend.json"));
    assert_eq!(json["config"]["grid"], 12);
}

#[test]
fn config_file_is_read_and_echoed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("classify.json");
    std::fs::write(&cfg, r#"{"psi": {"family": "log_power", "params": {"c": 1.0, "beta": 1.1}}, "decades": 200}"#).unwrap();
    let out = welding(&["classify", "--config", cfg.to_str().unwrap()], &tmp.path().join("o"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = read_json(&tmp.path().join("o/classify.json"));
    assert_eq!(json["config"]["decades"], 200);
    assert_eq!(json["thm51"]["verdict"], "unbounded");
}

#[test]
fn runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for run in ["a", "b"] {
        let out = welding(&["boundary", "--seed", "7", "--grid", "128"], &tmp.path().join(run));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["boundary.json", "envelope.csv", "curve.csv"] {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn bad_input_exits_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"grid": 8, "unknown_key": true}"#).unwrap();
    let out = welding(&["extend", "--config", cfg.to_str().unwrap()], tmp.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown_key"));

    let out = welding(&["extend", "--config", "/nonexistent/config.json"], tmp.path());
    assert!(!out.status.success());

    let out = welding(&["frobnicate"], tmp.path());
    assert!(!out.status.success());
}
