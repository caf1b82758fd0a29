//! Output schemas against checked-in golden files. Set GPNET_BLESS=1 to
//! rewrite them after an intended format change.

use std::path::{Path, PathBuf};
use std::process::Command;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_gpnet")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn compare(name: &str, actual: &[u8]) {
    let path = golden_dir().join(name);
    if std::env::var_os("GPNET_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(String::from_utf8_lossy(actual), String::from_utf8_lossy(&expected), "{name} differs from golden");
}

fn header(bytes: &[u8]) -> Vec<u8> {
    let line = bytes.split(|&b| b == b'\n').next().unwrap();
    [line, b"\n"].concat()
}

fn input() -> String {
    golden_dir().join("pair.csv").display().to_string()
}

#[test]
fn score_report() {
    let out = run(&["score", "--input", &input(), "--child", "x", "--parents", "u", "--scorer", "linear_gaussian"]);
    compare("score.csv", &out);
}

#[test]
fn learn_report() {
    let out = run(&["learn", "--input", &input(), "--scorer", "linear_gaussian"]);
    let mut json: serde_json::Value = serde_json::from_slice(&out).unwrap();
    // the path depends on the checkout location
    json["input"] = "pair.csv".into();
    compare("learn.json", format!("{}\n", serde_json::to_string_pretty(&json).unwrap()).as_bytes());
}

#[test]
fn experiment_headers() {
    let small = ["--seeds", "0", "--scorer", "linear_gaussian", "--test-count", "10"];
    let sweep = run(&[&["noise-sweep", "--noise", "0.4", "--functions", "linear", "--samples", "20"][..], &small].concat());
    let comparison =
        run(&[&["model-comparison", "--functions", "linear", "--sizes", "20", "--noise", "0.4"][..], &small].concat());
    let recovery = run(&[
        "structure-recovery", "--architectures", "pair", "--seeds", "0", "--scorer", "linear_gaussian", "--samples", "20",
    ]);
    let benchmark = run(&[&["benchmark", "--input", &input(), "--sizes", "20"][..], &small].concat());
    let profile = run(&["predict-profile", "--input", &input(), "--child", "x", "--parent", "u", "--grid-points", "3"]);
    let all = [sweep, comparison, recovery, benchmark, profile].iter().flat_map(|o| header(o)).collect::<Vec<u8>>();
    compare("headers.csv", &all);
}
