//! End-to-end runs of the command-line interface and its exit codes.

use std::path::{Path, PathBuf};

use hvlab::io::DomainArtifact;

const STREET: &str = r#"{
    "kind": "periodic",
    "points": [[1.0, 0.0], [-0.3333333333333333, 0.0]],
    "weights": [1.0, -1.0],
    "c0": [0.25, 0.0],
    "case": "a",
    "build": {"t": 0.05, "grid": 48}
}"#;

const THREE_LANE_SEED: &str = r#"{
    "kind": "periodic",
    "points": [[-5.5, 0.1], [-0.2, -0.05], [1.0, 0.0]],
    "weights": [1.0, 1.0, -1.5],
    "c0": [-0.25, 0.0],
    "case": "b",
    "solver": {"frozen": [2]}
}"#;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hvlab").chain(args.iter().copied());
    let code = hvlab::cli::run(argv.map(std::ffi::OsString::from), &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn forces_reports_balance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "street.json", STREET);
    let r = run(&["forces", s(&cfg)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert!(v["max_abs_force"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["jacobian_rank"], 1);
}

#[test]
fn solve_finds_the_three_lane_roots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "lane.json", THREE_LANE_SEED);
    let r = run(&["solve", s(&cfg)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    let xs: Vec<f64> = v["points"].as_array().unwrap().iter().map(|p| p[0].as_f64().unwrap()).collect();
    let root = 2.0 * 2f64.sqrt();
    assert!((xs[0] - (-3.0 - root)).abs() < 1e-9, "{xs:?}");
    assert!((xs[1] - (-3.0 + root)).abs() < 1e-9, "{xs:?}");
}

#[test]
fn build_writes_consistent_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "street.json", STREET);
    let out = dir.path().join("out");
    let r = run(&["--out", s(&out), "--tiles", "2", "build", s(&cfg)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let json = std::fs::read_to_string(out.join("street.json")).unwrap();
    let artifact = DomainArtifact::from_json(&json).unwrap();
    let csv = DomainArtifact::read_csv_curves(std::fs::File::open(out.join("street.csv")).unwrap()).unwrap();
    assert_eq!(csv, artifact.curves);
    let svg = std::fs::read_to_string(out.join("street.svg")).unwrap();
    let paths = roxmltree::Document::parse(&svg).unwrap().descendants().filter(|n| n.has_tag_name("path")).count();
    assert_eq!(paths, 2 * artifact.curves.len());

    let check = run(&["check", s(&out.join("street.json"))]);
    assert_eq!(check.code, 0, "{}", check.stdout);

    let mut broken: serde_json::Value = serde_json::from_str(&json).unwrap();
    broken["curves"][0]["points"][3] = serde_json::json!([40.0, 40.0]);
    let bad = write(dir.path(), "broken.json", &broken.to_string());
    let check = run(&["check", s(&bad)]);
    assert_eq!(check.code, 1);
    assert!(check.stdout.contains("FAIL"));
}

#[test]
fn check_runs_identity_suites() {
    let r = run(&["check", "--random", "20", "--seed", "5"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("random.periodic.sum_forces"));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["forces", s(&dir.path().join("missing.json"))]).code, 2);
    let unknown = write(dir.path(), "unknown.json", r#"{"kind": "finite", "points": [], "weights": [], "extra": 1}"#);
    assert_eq!(run(&["forces", s(&unknown)]).code, 2);
    let dup = write(dir.path(), "dup.json", &THREE_LANE_SEED.replace("[-5.5, 0.1]", "[1.0, 0.0]"));
    let r = run(&["solve", s(&dup)]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["classical", "enneper"]).code, 2);
}

#[test]
fn oversized_t_is_a_geometry_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "street.json", STREET);
    let r = run(&["build", s(&cfg), "--t", "2.0"]);
    assert_eq!(r.code, 4);
    assert!(r.stderr.contains("t_max"), "{}", r.stderr);
}

#[test]
fn solver_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // Two equal-sign vortices repel, so no balanced configuration exists.
    let cfg = write(dir.path(), "pair.json", r#"{"kind": "finite", "points": [[0, 0], [1, 0]], "weights": [1.0, 1.0]}"#);
    let r = run(&["solve", s(&cfg)]);
    assert_eq!(r.code, 3, "{}", r.stderr);
}

#[test]
fn classical_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["--out", s(dir.path()), "--grid", "120", "classical", "karcher"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for ext in ["json", "csv", "svg"] {
        assert!(dir.path().join(format!("karcher.{ext}")).exists());
    }
    assert!(r.stdout.contains("classical.speed"));
}
