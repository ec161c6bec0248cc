use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_newton-depth"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&o.stdout))
    })
}

const MAX_NET: &str = r#"{"input_dim": 2, "layers": [[[1,-1],[0,1],[0,-1]], [[1,1,-1]], [[1]]]}"#;
const SIMPLEX4: &str =
    r#"{"ambient": 4, "vertices": [[0,0,0,0],[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}"#;
const SQUARE: &str = r#"{"ambient": 2, "vertices": [[0,0],[1,0],[0,1],[1,1]]}"#;
const TRIANGLE: &str = r#"{"ambient": 2, "vertices": [[0,0],[1,0],[0,1]]}"#;

#[test]
fn volume_of_simplex() {
    let d = tempfile::tempdir().unwrap();
    let p = write(d.path(), "s.json", SIMPLEX4);
    let o = run(&["volume", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["volume"], 1);
}

#[test]
fn biases_are_rejected() {
    let d = tempfile::tempdir().unwrap();
    let p = write(d.path(), "n.json", r#"{"input_dim": 1, "layers": [[[1]],[[1]]], "biases": [[0]]}"#);
    let o = run(&["compile", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bias-free"));
}

#[test]
fn malformed_input_exits_2() {
    let d = tempfile::tempdir().unwrap();
    let p = write(d.path(), "bad.json", "{not json");
    assert_eq!(run(&["volume", p.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["volume", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn caps_exit_3() {
    let d = tempfile::tempdir().unwrap();
    let p = write(d.path(), "s.json", SIMPLEX4);
    let o = run(&["--max-dim", "3", "volume", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn compile_and_eval() {
    let d = tempfile::tempdir().unwrap();
    let net = write(d.path(), "net.json", MAX_NET);
    let o = run(&["eval", net.to_str().unwrap(), "--point", "3,-1"]);
    assert_eq!(stdout_json(&o)["values"][0], 3);
    let o = run(&["compile", net.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["hidden_layers"], 2);
    assert!(v["outputs"][0]["pos_tree"]["depth"].as_u64().unwrap() <= 2);
    let pair = write(d.path(), "pair.json", &v["outputs"][0].to_string());
    let o = run(&["eval", pair.to_str().unwrap(), "--point", "-1/2,5/3"]);
    assert_eq!(stdout_json(&o)["value"], "5/3");
}

#[test]
fn sum_hull_faces() {
    let d = tempfile::tempdir().unwrap();
    let a = write(d.path(), "a.json", SQUARE);
    let b = write(d.path(), "b.json", TRIANGLE);
    let o = run(&["msum", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(stdout_json(&o)["vertices"].as_array().unwrap().len(), 5);
    let o = run(&["chull", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(stdout_json(&o)["vertices"].as_array().unwrap().len(), 4);
    let o = run(&["faces", a.to_str().unwrap(), "--min-dim", "1"]);
    assert_eq!(stdout_json(&o)["faces"].as_array().unwrap().len(), 5);
}

#[test]
fn subdivide_is_deterministic_and_audited() {
    let d = tempfile::tempdir().unwrap();
    let a = write(d.path(), "a.json", SQUARE);
    let b = write(d.path(), "b.json", TRIANGLE);
    for op in ["sum", "conv"] {
        let args = ["subdivide", op, a.to_str().unwrap(), b.to_str().unwrap(), "--seed", "9"];
        let first = run(&args);
        assert_eq!(first.status.code(), Some(0));
        assert_eq!(stdout_json(&first)["audit"]["passed"], true);
        assert_eq!(first.stdout, run(&args).stdout);
    }
    let o = run(&["subdivide", "sum", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "--seed is mandatory");
}

#[test]
fn sample_then_synthesize() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["sample-pk", "--k", "2", "--n", "2", "--seed", "4"]);
    let g = write(d.path(), "g.json", std::str::from_utf8(&o.stdout).unwrap());
    let h = write(d.path(), "h.json", r#"{"ambient": 2, "root": 0, "nodes": [{"leaf": [0, 0]}]}"#);
    let o = run(&["synthesize", g.to_str().unwrap(), h.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let net = stdout_json(&o);
    assert_eq!(net["layers"].as_array().unwrap().len(), 3);
}

#[test]
fn check_qk_verdicts() {
    let d = tempfile::tempdir().unwrap();
    let t = write(d.path(), "t.json", TRIANGLE);
    let o = run(&["check-qk", t.to_str().unwrap(), "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["verdict"], "non-member");
    let t2 = write(d.path(), "t2.json", r#"{"ambient": 2, "vertices": [[0,0],[2,0],[0,2]]}"#);
    let o = run(&["check-qk", t2.to_str().unwrap(), "--k", "1"]);
    assert_eq!(stdout_json(&o)["verdict"], "member");
}

#[test]
fn certify_level_one() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("cert.json");
    let args = ["certify", "--k", "1", "--seed", "5", "--trials", "8", "--eval-points", "20", "--out", out.to_str().unwrap()];
    let o = bin().args(args).env("NEWTON_DEPTH_THREADS", "2").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let first = std::fs::read(&out).unwrap();
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["verdict"], "certified");
    assert_eq!(v["witness"]["hidden_layers"], 2);
    let o = bin().args(args).env("NEWTON_DEPTH_THREADS", "1").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), first, "thread count must not change the bytes");
}

#[test]
fn explore_double_simplex() {
    let o = run(&["certify", "--k", "1", "--seed", "0", "--explore-double"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["verdict"], "member");
}

#[test]
fn bad_thread_count() {
    let o = bin().args(["certify", "--k", "0", "--seed", "1"]).env("NEWTON_DEPTH_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
