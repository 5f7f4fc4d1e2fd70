//! End-to-end checks of the command-line surface: config round-trips, exit
//! codes, and output formats.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_delpezzo"))
}

fn write_tmp(name: &str, content: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("delpezzo-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

const CASE_5A: &str = r#"{
  "characteristic": 0,
  "towers": [
    {"base": ["1","0","0"], "height": 1},
    {"base": ["0","1","0"], "height": 1},
    {"base": ["0","0","1"], "height": 1},
    {"base": ["1","1","0"], "height": 1}
  ]
}"#;

const FOUR_COLLINEAR: &str = r#"{
  "characteristic": 0,
  "towers": [
    {"base": ["1","0","0"], "height": 1},
    {"base": ["0","1","0"], "height": 1},
    {"base": ["1","1","0"], "height": 1},
    {"base": ["1","2","0"], "height": 1}
  ]
}"#;

const CASE_1T: &str = r#"{
  "characteristic": 2,
  "towers": [
    {"base": ["1","0","0"], "carrier": "x^2*z+y^3", "height": 8}
  ]
}"#;

#[test]
fn analyze_reports_invariants() {
    let path = write_tmp("case-5A.json", CASE_5A);
    let out = bin().arg("analyze").arg(&path).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("deg 5"));
    assert!(text.contains("A_1"));
    assert!(text.contains("7 lines"));
    assert!(text.contains("h0=1"));
    assert!(text.contains("smooth"));
}

#[test]
fn analyze_flags_position_violations() {
    let path = write_tmp("four-collinear.json", FOUR_COLLINEAR);
    let out = bin().arg("analyze").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("almost general position"));
}

#[test]
fn analyze_height_eight_char_two() {
    let path = write_tmp("case-1T.json", CASE_1T);
    let out = bin()
        .arg("analyze")
        .arg(&path)
        .args(["--q", "4,8"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("h0=3"), "{}", text);
    assert!(text.contains("NON-REDUCED"), "{}", text);
}

#[test]
fn analyze_rejects_bad_input() {
    let path = write_tmp("bad.json", "{ not json");
    let out = bin().arg("analyze").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classes_counts() {
    let out = bin().args(["classes", "--n", "6"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["roots"].as_array().unwrap().len(), 72);
    assert_eq!(v["exceptional"].as_array().unwrap().len(), 27);
    let out = bin().args(["classes", "--n", "1"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["roots"].as_array().unwrap().len(), 0);
    assert_eq!(v["exceptional"].as_array().unwrap().len(), 1);
    // out of range
    let out = bin().args(["classes", "--n", "9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dot_output_shape() {
    let path = write_tmp("dot-5A.json", CASE_5A);
    let out = bin().arg("dot").arg(&path).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("graph dual {"));
    // 1 filled node, 7 open nodes
    assert_eq!(text.matches("style=filled").count(), 1);
    assert_eq!(text.matches("label=").count(), 8);
}

#[test]
fn tables_char_zero_passes() {
    let out = bin()
        .args(["tables", "--char", "0", "--no-point-counts"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("51 passed, 0 failed of 51"), "{}", text);
}

#[test]
fn corpus_configs_roundtrip_through_serde() {
    use delpezzo::cluster::ConfigSpec;
    for p in [0u64, 2, 3, 5] {
        for inst in delpezzo::corpus::load_corpus(p).unwrap() {
            let json = serde_json::to_string(&inst.spec).unwrap();
            let back: ConfigSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back, inst.spec);
            let json2 = serde_json::to_string(&back).unwrap();
            assert_eq!(json, json2);
        }
    }
}
