//! End-to-end runs of the command line binary on the bundled data files.

use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_nerveq")).args(args).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("nerveq-{}-{name}", std::process::id()))
}

#[test]
fn compose_and_normalize() {
    assert_eq!(run(&["compose", "map(2->1)[1,1] o map(2->2)[2,1]"]).1, "map(2->1)[1,1]\n");
    assert_eq!(run(&["normalize", "braid(2){s1 s1'}"]).1, "braid(2){}[1,2]\n");
    let (code, out, _) = run(&["compose", "map(2->2)[2,1] o map(2->2)[2,1]", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "nerveq.morphism/1");
    assert_eq!(v["text"], "map(2->2)[1,2]");
}

#[test]
fn errors_report_positions_and_exit_two() {
    let (code, _, err) = run(&["compose", "braid(2){s1} o map(2->2)[1,2] * (t12)"]);
    assert_eq!(code, 2);
    assert!(err.contains("line 1"), "{err}");
    assert_eq!(run(&["compose", "map(2->1)[1,1"]).0, 2);
    assert_eq!(run(&["nerve", "--algebra", "/nonexistent.json", "--morphism", "map(1->1)[1]"]).0, 2);
    assert_eq!(run(&["--version"]).0, 0);
}

#[test]
fn nerve_triplets() {
    let (code, out, _) =
        run(&["nerve", "--algebra", &data("s3_fun.json"), "--morphism", "map(2->2)[2,1]", "--mode", "symmetric"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("h^0"));
    // antipode on Fun(S3): six entries
    assert_eq!(lines.filter(|l| !l.is_empty()).count(), 6);
    let (code, out, _) = run(&[
        "nerve", "--algebra", &data("sym_xy.json"), "--morphism", "map(3->3)[1,2,3] * (t12)",
        "--mode", "infinitesimal", "--order", "1", "--cap", "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "h^1\n2\tX⊗Y\tY⊗1\t1\n2\tY⊗X\tY⊗1\t-1\n");
}

#[test]
fn associator_files() {
    let path = scratch("phi.json");
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["assoc", "solve", "--degree", "3", "--out", p]);
    assert_eq!(code, 0);
    assert!(out.starts_with("1 + 1/24 [x,y]"), "{out}");
    assert_eq!(run(&["assoc", "check", p]).0, 0);
    let (code, out, _) = run(&["assoc", "check", &data("phi_one.json")]);
    assert_eq!(code, 1);
    assert!(out.contains("hexagon: fails in degree 2"), "{out}");
    let (code, out, _) = run(&["transport", "braid(2){s1}", "--assoc", p, "--order", "1"]);
    assert_eq!((code, out.as_str()), (0, "map(2->2)[2,1] + 1/2 map(2->2)[2,1] * (t12)\n"));
    std::fs::remove_file(path).ok();
}

#[test]
fn quantize_writes_report() {
    let path = scratch("q.json");
    let p = path.to_str().unwrap();
    let (code, _, _) = run(&["quantize", "--algebra", &data("sym_xy.json"), "--cap", "3", "--out", p]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], "nerveq.quantized/1");
    assert_eq!(v["m"].as_array().unwrap().len(), 3);
    std::fs::remove_file(path).ok();
    let (code, out, _) =
        run(&["quantize", "--algebra", &data("sym_xy.json"), "--cap", "3", "--assoc", &data("phi_one.json")]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"), "{out}");
}

#[test]
fn check_suites() {
    assert_eq!(run(&["check", "--algebra", &data("s3_fun.json")]).0, 0);
    assert_eq!(run(&["check", "--algebra", &data("s3_group_algebra.json")]).0, 0);
    assert_eq!(run(&["check", "--algebra", &data("sym_xy.json"), "--cap", "3"]).0, 0);
    assert_eq!(run(&["check", "--assoc", "solve:3", "--braids"]).0, 0);
}
