use std::path::PathBuf;
use std::process::Command;

use serde_json::{json, Value};

fn fixture(path: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(path)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hfksurg"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().expect("exited normally"), String::from_utf8(out.stdout).unwrap())
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, stdout) = run(args);
    let value = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stdout}"));
    (code, value)
}

#[test]
fn hfk_trefoil_n2() {
    let file = fixture("valid/trefoil.json");
    let (code, r) = report(&["hfk", "--n", "2", &file]);
    assert_eq!(code, 0);
    assert_eq!(r["result"], json!({"0": 1, "1": 0, "2": 0, "3": 1}));
    assert_eq!(r["command"], json!(["hfk", "--n", "2", file]));
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn simple_trefoil_n1() {
    let (code, r) = report(&["simple", "--n", "1", &fixture("valid/trefoil.json")]);
    assert_eq!(code, 0);
    assert_eq!(
        r["result"],
        json!({"simple": false, "witness_levels": [1], "hfk_total": 3, "hf_total": 1})
    );
}

#[test]
fn hf_and_invariants() {
    let trefoil = fixture("valid/trefoil.json");
    assert_eq!(report(&["hf", "--n", "2", &trefoil]).1["result"], json!({"0": 1, "1": 1}));
    assert_eq!(report(&["genus", &trefoil]).1["result"], json!({"genus": 1}));
    assert_eq!(report(&["d-invariant", &trefoil]).1["result"], json!({"d": 0}));
    assert_eq!(
        report(&["homology", &trefoil]).1["result"],
        json!({"by_degree": {"0": 1}, "total": 1})
    );
    let alex = report(&["alexander", &trefoil]).1;
    assert_eq!(alex["result"]["polynomial"], "t - 1 + t^-1");
    let fig8 = report(&["alexander", &fixture("valid/figure_eight.json")]).1;
    assert_eq!(fig8["result"]["coefficients"], json!({"-1": -1, "0": 3, "1": -1}));
}

#[test]
fn staircase_make_round_trips_through_check() {
    let (code, text) = run(&["staircase", "make", "--steps", "1,3", "--d", "-2"]);
    assert_eq!(code, 0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(&path, &text).unwrap();
    let path = path.to_string_lossy().into_owned();
    let (code, r) = report(&["staircase", "check", &path]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["staircase"], true);
    assert_eq!(r["result"]["steps"], json!([1, 3]));
    assert_eq!(r["result"]["d_top"], -2);
}

#[test]
fn staircase_make_trefoil_matches_fixture() {
    let (_, text) = run(&["staircase", "make", "--steps", "1", "--d", "0"]);
    let made: Value = serde_json::from_str(&text).unwrap();
    let fixture: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("valid/trefoil.json")).unwrap())
            .unwrap();
    assert_eq!(made["generators"], fixture["generators"]);
    assert_eq!(made["differential"], fixture["differential"]);
    assert_eq!(made["duality"], fixture["duality"]);
}

#[test]
fn staircase_check_reports_reason() {
    let (code, r) = report(&["staircase", "check", &fixture("valid/figure_eight.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["staircase"], false);
    assert_eq!(r["result"]["reason"]["kind"], "level_multiplicity");
}

#[test]
fn epsilon_accepts_negative_levels() {
    let path = {
        let dir = tempfile::tempdir().unwrap();
        let (_, text) = run(&["staircase", "make", "--steps", "1,2"]);
        let p = dir.path().join("g2.json");
        std::fs::write(&p, text).unwrap();
        (dir, p)
    };
    let file = path.1.to_string_lossy().into_owned();
    let (code, r) = report(&["epsilon", "--s", "-1", &file]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["result"]["s"], -1);
    assert_eq!(r["result"]["vanishes"], true);
    let (code, r) = report(&["epsilon", "--s", "0", &fixture("valid/unknot.json")]);
    assert_eq!(code, 1);
    assert_eq!(r["error"]["kind"], "surgery");
}

#[test]
fn every_invalid_fixture_names_its_generator() {
    let cases = [
        ("level_preserving", "u"),
        ("level_decreasing", "e"),
        ("degree_law", "x-1"),
        ("d_squared_nonzero", "low"),
        ("duality_not_involution", "r"),
        ("duality_level", "j"),
        ("duality_degree", "j"),
        ("duality_missing", "z"),
        ("unknown_generator", "ghost"),
        ("duplicate_id", "c"),
        ("repeated_target", "x0"),
    ];
    for (kind, culprit) in cases {
        let (code, r) = report(&["validate", &fixture(&format!("invalid/{kind}.json"))]);
        assert_eq!(code, 1, "{kind}");
        assert_eq!(r["error"]["kind"], "validation");
        let violations = r["error"]["violations"].as_array().unwrap();
        assert!(
            violations.iter().any(|v| v["kind"] == kind
                && v.as_object().unwrap().values().any(|x| x == culprit)),
            "{kind}: {violations:?}"
        );
        assert!(r["error"]["message"].as_str().unwrap().contains(culprit));
    }
}

#[test]
fn malformed_and_schema_errors() {
    let (code, r) = report(&["validate", &fixture("invalid/malformed.json")]);
    assert_eq!((code, r["error"]["kind"].as_str()), (1, Some("parse")));
    let (code, r) = report(&["validate", &fixture("invalid/schema.json")]);
    assert_eq!((code, r["error"]["kind"].as_str()), (1, Some("schema")));
    let (code, r) = report(&["validate", "/nonexistent/file.json"]);
    assert_eq!((code, r["error"]["kind"].as_str()), (1, Some("io")));
    assert_eq!(r["input_digest"], Value::Null);

    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, [0xff, 0xfe, 0x00, 0x7b]).unwrap();
    let (code, r) = report(&["hfk", "--n", "1", &junk.to_string_lossy()]);
    assert_eq!((code, r["error"]["kind"].as_str()), (1, Some("parse")));
}

#[test]
fn usage_errors_exit_2() {
    let trefoil = fixture("valid/trefoil.json");
    for args in [
        vec!["hfk", "--n", "0", trefoil.as_str()],
        vec!["simple", "--n", "-3", trefoil.as_str()],
        vec!["hf", trefoil.as_str()],
        vec!["frobnicate"],
        vec!["verify", "--suite", "nope", "--max-genus", "1", "--max-n", "1"],
        vec!["verify", "--suite", "converse", "--max-genus", "1", "--max-n", "2", "--seed", "3"],
    ] {
        let (code, r) = report(&args);
        assert_eq!(code, 2, "{args:?}");
        assert_eq!(r["error"]["kind"], "usage");
    }
    let (code, r) = report(&["staircase", "make", "--steps", "2,1"]);
    assert_eq!((code, r["error"]["kind"].as_str()), (1, Some("classify")));
}

#[test]
fn help_and_version_exit_0() {
    let (code, text) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(text.contains("Usage"));
    let (code, text) = run(&["--version"]);
    assert_eq!(code, 0);
    assert!(text.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn verify_suites() {
    let (code, r) = report(&["verify", "--suite", "converse", "--max-genus", "2", "--max-n", "6"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["checks"], 11);
    assert_eq!(r["result"]["failures"], 0);
    assert!(r["result"].get("elapsed_ms").is_none());

    let (code, r) = report(&[
        "verify", "--suite", "small-surgery", "--max-genus", "3", "--max-n", "8", "--timing",
    ]);
    assert_eq!(code, 0);
    assert!(r["result"]["elapsed_ms"].is_u64());

    let (code, r) = report(&[
        "verify", "--suite", "large-forward", "--max-genus", "3", "--max-n", "6", "--random",
        "40", "--seed", "7", "--max-dim", "7",
    ]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["result"]["params"]["source"]["kind"], "random");
    assert_eq!(r["result"]["instances"], 40);
}

#[test]
fn output_is_deterministic() {
    let trefoil = fixture("valid/trefoil.json");
    let args = ["hf", "--n", "3", trefoil.as_str()];
    assert_eq!(run(&args), run(&args));
    let suite = ["verify", "--suite", "large-forward", "--max-genus", "2", "--max-n", "4", "--random", "25"];
    assert_eq!(run(&suite), run(&suite));
}
