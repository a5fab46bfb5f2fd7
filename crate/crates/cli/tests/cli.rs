use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conedensity")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn densify_pair(dir: &Path) -> PathBuf {
    let out = dir.join("report.json");
    let o = run(&["densify", "--sheaf", path_str(&data("p2_pair.json")), "--epsilon", "1/4", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn densify_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = densify_pair(dir.path());
    let doc: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(doc["kind"], "densify");
    assert_eq!(doc["certified"], "5/4");
    assert_eq!(doc["bound"], "20");
    assert_eq!(doc["layer_count"], 2);
    let o = run(&["verify", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("ok"));
}

#[test]
fn reports_are_byte_identical_across_thread_counts() {
    let mut texts = Vec::new();
    for threads in ["1", "4"] {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("report.json");
        let o = run(&["--threads", threads, "densify", "--sheaf", path_str(&data("p2_pair.json")), "--epsilon", "1/4", "--out", path_str(&out)]);
        assert_eq!(code(&o), 0);
        let text = std::fs::read_to_string(&out).unwrap();
        texts.push(text.replace(path_str(dir.path()), "<dir>"));
    }
    assert!(texts[0] == texts[1], "reports differ");
}

#[test]
fn tampered_certificate_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = densify_pair(dir.path());
    let mut doc: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    doc["certificate"]["b"] = Value::String("0".into());
    doc["certificate"]["a"] = Value::String("0".into());
    std::fs::write(&out, serde_json::to_vec(&doc).unwrap()).unwrap();
    assert_eq!(code(&run(&["verify", path_str(&out)])), 2);
}

#[test]
fn distance_between_equal_sheaves_is_zero() {
    let a = data("p2_zero.json");
    let o = run(&["distance", path_str(&a), path_str(&a), "--exact"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["value"], "0");
}

#[test]
fn distance_bounds_bracket_the_exact_value() {
    let (a, b) = (data("p2_zero.json"), data("p2_cone.json"));
    let exact: Value = serde_json::from_slice(&run(&["distance", path_str(&a), path_str(&b), "--exact"]).stdout).unwrap();
    let o = run(&["distance", path_str(&a), path_str(&b), "--bounds", "--samples", "vertices"]);
    let bounds: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(bounds["lower"], bounds["upper"]);
    assert_eq!(bounds["upper"], exact["value"]);
}

#[test]
fn decompose_reports_a_barcode() {
    let o = run(&["decompose", "--sheaf", path_str(&data("p2_cone.json")), "--point", "v0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["schema"], "conedensity/barcode@1");
}

#[test]
fn invalid_input_exits_with_four() {
    let o = run(&["densify", "--graph", path_str(&data("bad_len.json")), "--sheaf", path_str(&data("p2_zero.json")), "--epsilon", "1/4"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/edges/0/len"));
    let o = run(&["densify", "--sheaf", path_str(&data("p2_zero.json")), "--epsilon=-1"]);
    assert_eq!(code(&o), 4);
    assert_eq!(code(&run(&["verify", path_str(&data("missing.json"))])), 4);
    assert_eq!(code(&run(&["distance", "--no-such-flag"])), 4);
}

#[test]
fn irdim_over_a_corpus() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["p2_zero.json", "p2_cone.json"] {
        std::fs::copy(data(f), dir.path().join(f)).unwrap();
    }
    let out = dir.path().join("irdim.out");
    let o = run(&["irdim", "--corpus", path_str(dir.path()), "--epsilon", "1/4", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&run(&["verify", path_str(&out)])), 0);
}
