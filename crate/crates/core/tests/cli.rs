use std::fs;
use std::process::Command;

use hetero_choice::report::{self, ReportKind};

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hetero-choice")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["audit", "--rule", "nosuchrule"]).0, 1);
    assert_eq!(run(&["audit", "--rule", "weighted_sum", "--weights", "1,2,3", "--envs", "2"]).0, 1);
    assert_eq!(run(&["audit", "--rule", "erm_single", "--env-index", "0"]).0, 1);
    let (code, _, err) = run(&["verify", "--environments", "5"]);
    assert_eq!(code, 2, "{err}");
    assert_eq!(run(&["verify", "--environments", "2", "--axioms", "ic,iih,ir"]).0, 1);
    assert_eq!(run(&["verify", "--environments", "2", "--axioms", "ic,iih,ir", "--allow-no-po"]).0, 0);
    assert_eq!(run(&["verify", "--environments", "3", "--axioms", "ic,iih,ir", "--allow-no-po"]).0, 2);
    // Without CI the assertion is that every survivor is a dictatorship.
    assert_eq!(run(&["verify", "--environments", "3", "--assert-theorem"]).0, 0);
    assert_eq!(run(&["verify", "--environments", "2", "--omit-triples", "--assert-theorem"]).0, 3);
    assert_eq!(run(&["verify", "--environments", "3", "--axioms", "ic,po,iih,ir,ci", "--assert-theorem"]).0, 0);
}

#[test]
fn stdout_reports_validate() {
    let (code, out, _) = run(&["trace", "--environments", "4", "--env-index", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report::validate(&v), Ok(ReportKind::Trace));
    assert_eq!(v["result"]["terminal"], serde_json::json!([3]));
}

#[test]
fn profile_feeds_audit() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{
  "generator": {"environments": [
    {"kind": "label_flip", "samples": 80, "weights": [1.0, 1.0], "flip_rate": 0.0},
    {"kind": "label_flip", "samples": 80, "weights": [1.0, -1.0], "flip_rate": 0.2}
  ]},
  "hypotheses": [
    {"id": "a", "predictor": {"kind": "affine", "weights": [1.0, 1.0], "bias": 0.0}},
    {"id": "b", "predictor": {"kind": "affine", "weights": [1.0, -1.0], "bias": 0.0}},
    {"id": "c", "predictor": {"kind": "affine", "weights": [1.0, 0.0], "bias": 0.0}}
  ],
  "loss": {"kind": "hinge"}
}"#,
    )
    .unwrap();
    let profile = dir.path().join("profile.json");
    let (code, _, err) = run(&["profile", "--spec", spec.to_str().unwrap(), "--seed", "5", "--out", profile.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");

    let (code, out, err) = run(&["audit", "--rule", "leximin", "--profile-file", profile.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report::validate(&v), Ok(ReportKind::Audit));
    assert_eq!(v["result"]["domain"], serde_json::json!({"m": 3, "n": 2}));
}
