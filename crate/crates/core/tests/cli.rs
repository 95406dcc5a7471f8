use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_flatfront"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn pipeline_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let holo = path(dir.path(), "holo.json");
    let pair = path(dir.path(), "pair.json");
    let data = path(dir.path(), "data.json");
    let report = path(dir.path(), "report.json");
    let mesh = path(dir.path(), "front.obj");

    assert_eq!(run(&["generate", "--rows", "5", "--cols", "5", "--output", &holo]).0, 0);
    let (code, _) = run(&["validate", "--input", &holo, "--s", "-0.5", "--s", "0.5", "--report", &report]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&report).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["passed"], true);

    assert_eq!(run(&["gauss", "--input", &holo, "--output", &pair]).0, 0);
    assert_eq!(run(&["invert", "--input", &pair, "--output", &data]).0, 0);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&data).unwrap()).unwrap();
    assert_eq!(json["w"].as_array().unwrap().len(), 25);

    assert_eq!(run(&["export", "--input", &holo, "--output", &mesh]).0, 0);
    let obj = std::fs::read_to_string(&mesh).unwrap();
    assert_eq!(obj.lines().next(), Some("v 0 0 0"));
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 16);

    let (code, out) = run(&["weierstrass", "--input", &holo, "--s", "0.25"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"samples\""));
    assert_eq!(run(&["dual", "--input", &holo]).0, 0);

    assert_eq!(run(&["validate", "--input", &holo, "--t", "1"]).0, 1);
    assert_eq!(run(&["validate", "--input", &path(dir.path(), "missing.json")]).0, 2);
    assert_eq!(run(&["validate", "--input", &holo, "--tolerance", "bogus=1"]).0, 2);
    assert_eq!(run(&["gauss", "--input", &holo, "--output", &holo]).0, 2);
}

#[test]
fn darboux_then_invert() {
    let dir = tempfile::tempdir().unwrap();
    let holo = path(dir.path(), "holo.json");
    let pair = path(dir.path(), "pair.json");
    let args = ["generate", "--rows", "6", "--cols", "6", "--alpha", "1.4142135623730951", "--beta", "0.816496580927726", "--output", &holo];
    assert_eq!(run(&args).0, 0);
    let args = ["darboux", "--input", &holo, "--t", "-0.5", "--seed-re", "0.3", "--seed-im", "-1.2", "--output", &pair];
    assert_eq!(run(&args).0, 0);
    let (code, out) = run(&["invert", "--input", &pair]);
    assert_eq!(code, 0);
    assert!(out.contains("\"holo\""));
}
