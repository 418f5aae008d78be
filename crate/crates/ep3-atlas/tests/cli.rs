//! End-to-end CLI checks: exit codes, output determinism, family-file
//! validation, CSV shapes and schema conformance of the loop summary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ep3-atlas"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_reports_the_two_waveguide_scenarios() {
    let out = run(&["classify", "--family", "waveguide-ab-equal"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["kind"], "ThirdRoot");

    let out = run(&["classify", "--family", "waveguide-ab-opposite"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["kind"], "SquareRootPlusTaylor");
}

#[test]
fn zero_perturbation_family_is_degenerate_but_valid() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/zero-perturbation.json");
    let selector = format!("file:{}", path.display());
    let out = run(&["classify", "--family", &selector]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["kind"], "DegenerateOther");
}

#[test]
fn nonsymmetric_family_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"name":"bad","degree":1,"matrices":[
            [[[0,0],[1,0]],[[2,0],[0,0]]],
            [[[1,0],[0,0]],[[0,0],[1,0]]]
        ]}"#,
    )
    .unwrap();
    let selector = format!("file:{}", path.display());
    let out = run(&["classify", "--family", &selector]);
    assert_eq!(out.status.code(), Some(2), "symmetry violations are computation errors");
    assert_eq!(stdout_json(&out)["error"]["kind"], "InvalidInput");
}

#[test]
fn usage_errors_exit_with_code_one() {
    let out = run(&["classify", "--family", "no-such-family"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["loop", "--family", "waveguide-ab-equal", "--steps", "7", "--out", "/tmp/x"]);
    assert_eq!(out.status.code(), Some(2), "odd step counts are rejected by the module");
    let out = bin()
        .args(["sheet", "--family", "waveguide-ab-equal", "--grid", "3,3", "--out", "/tmp/x"])
        .env("EP3_ATLAS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "bad thread cap is a usage error");
}

#[test]
fn help_exits_with_code_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["loop", "--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reruns_are_byte_identical() {
    let first = run(&["classify", "--family", "waveguide-ab-opposite"]);
    let second = run(&["classify", "--family", "waveguide-ab-opposite"]);
    assert_eq!(first.stdout, second.stdout);

    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let status = run(&[
            "loop",
            "--family",
            "waveguide-ab-equal",
            "--radius",
            "0.1",
            "--steps",
            "128",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(status.status.code(), Some(0));
    }
    for suffix in [".csv", "_summary.json"] {
        let a = std::fs::read(dir.path().join(format!("a{suffix}"))).unwrap();
        let b = std::fs::read(dir.path().join(format!("b{suffix}"))).unwrap();
        assert_eq!(a, b, "loop outputs must be byte-identical across reruns");
    }
}

#[test]
fn sheet_csv_has_the_documented_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sheet");
    let status = bin()
        .args([
            "sheet",
            "--family",
            "waveguide-ab-equal",
            "--grid",
            "41,41",
            "--bounds",
            "-0.2,0.2,-0.2,0.2",
            "--out",
            out.to_str().unwrap(),
        ])
        .env("EP3_ATLAS_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("sheet.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re_z,im_z,branch,re_lambda,im_lambda,defect"));
    assert_eq!(lines.count(), 41 * 41 * 3, "three branch rows per grid point");
    // the grid contains z = 0, where the family is defective
    assert!(text.lines().any(|l| l.starts_with("0,0,") && l.ends_with(",1")));
}

/// Structural validation against the shipped schema: all required keys
/// present, no keys beyond the declared properties.
#[test]
fn loop_summary_matches_the_shipped_schema() {
    let schema_path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/loop-summary.schema.json");
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let required: Vec<&str> =
        schema["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let declared: Vec<&str> = schema["properties"].as_object().unwrap().keys().map(|k| k.as_str()).collect();

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("loop");
    let status = run(&[
        "loop",
        "--family",
        "waveguide-ab-opposite",
        "--radius",
        "0.1",
        "--steps",
        "128",
        "--cycles",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(0));
    let summary: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("loop_summary.json")).unwrap(),
    )
    .unwrap();
    let object = summary.as_object().unwrap();
    for key in &required {
        assert!(object.contains_key(*key), "summary is missing required key {key}");
    }
    for key in object.keys() {
        assert!(declared.contains(&key.as_str()), "summary has undeclared key {key}");
    }
    assert_eq!(summary["command"], "loop");
    assert_eq!(summary["branch_count"], 3);
    assert_eq!(summary["cycle_structure"].as_array().unwrap().len(), 2);
}

#[test]
fn find_ep_converges_from_the_documented_guess() {
    let out = run(&[
        "find-ep",
        "--family",
        "waveguide-2param",
        "--guess",
        "0.1,-0.05",
        "--guess-lambda",
        "0,0.05",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["verified_order"], 3);
    for p in report["params"].as_array().unwrap() {
        assert!(p[0].as_f64().unwrap().abs() < 1e-8);
        assert!(p[1].as_f64().unwrap().abs() < 1e-8);
    }
}

#[test]
fn codimension_violation_is_a_computation_error() {
    let out = run(&["find-ep", "--family", "waveguide-ab-equal", "--order", "3", "--guess", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"]["kind"], "InvalidInput");
}
