use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cat0_boundary::experiments::{ExperimentConfig, VerificationReport};

fn cat0lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cat0lab")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn moran_metric_on_ternary_tree() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(dir.path(), "tree3.json", r#"{"kind":"tree","tree_branching":3,"truncation_depth":8}"#);
    let o = cat0lab(&["metric", "--space", &space, "--kind", "moran", "--pair", "0.0.0,0.0.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0.4");
}

#[test]
fn annulus_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(dir.path(), "plane.json", r#"{"kind":"plane"}"#);
    let o = cat0lab(&["experiment", "annulus", "--space", &space, "--D", "10,100"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "D,mesh,lebesgue,M");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("10,"));
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cat0lab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cat0lab(&["verify", "--config", "/definitely/missing.json"]).status.code(), Some(2));
    let broken = write(dir.path(), "broken.json", "{ not json");
    let o = cat0lab(&["verify", "--config", &broken]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not valid JSON"));
    let unknown = write(dir.path(), "unknown.json", r#"{"seed": 1, "bogus": true}"#);
    let o = cat0lab(&["verify", "--config", &unknown]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema violation"));
    let o = cat0lab(&["verify", "--set", "h2_epsilon=0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sqrt(2) - 1"));
}

#[test]
fn verify_writes_reparsable_report_without_touching_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_text = serde_json::to_string_pretty(&ExperimentConfig::default()).unwrap();
    let cfg = write(dir.path(), "default.json", &cfg_text);
    let out = dir.path().join("report.json");
    let o = cat0lab(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&cfg).unwrap(), cfg_text);
    let text = fs::read_to_string(&out).unwrap();
    let report: VerificationReport = serde_json::from_str(&text).unwrap();
    assert!(report.all_passed());
    assert_eq!(report.schema_version, 1);
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", text);
}

#[test]
fn failing_checks_exit_1() {
    // Small radii leave the plane annulus mesh far from its limit.
    let o = cat0lab(&["verify", "--set", "annulus.plane_d=[1,100]"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("experiments.annulus_plane"));
}

#[test]
fn cover_and_pullback_documents() {
    let dir = tempfile::tempdir().unwrap();
    let plane = write(dir.path(), "plane.json", r#"{"kind":"plane"}"#);
    let o = cat0lab(&["cover", "--space", &plane, "--l", "0.3", "--net", "64", "--merge", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["schema_version"], 1);
    let cover: cat0_boundary::covers::Cover = serde_json::from_value(doc["cover"].clone()).unwrap();
    assert_eq!(cover.n_colors(), 2);
    assert_eq!(serde_json::to_value(&cover).unwrap(), doc["cover"]);

    let tree = write(dir.path(), "tree.json", r#"{"kind":"tree","tree_branching":3,"truncation_depth":8}"#);
    let o = cat0lab(&["pullback", "--space", &tree, "--l", "2,1"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["reports"].as_array().unwrap().len(), 2);
    assert_eq!(doc["passed"], true);
}

#[test]
fn space_info_and_visual_metric() {
    let o = cat0lab(&["space-info", "--space", r#"{"kind":"hyperbolic_plane"}"#]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["kind"], "hyperbolic_plane");
    assert!((doc["delta"].as_f64().unwrap() - 3f64.ln()).abs() < 1e-15);

    let o = cat0lab(&[
        "metric",
        "--space",
        r#"{"kind":"tree","tree_branching":3,"truncation_depth":8}"#,
        "--kind",
        "visual",
        "--pair",
        "1.2(0),1.0",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((doc["value"].as_f64().unwrap() - (-0.5f64).exp()).abs() < 1e-12);
}

#[test]
fn quasisymmetry_is_seeded() {
    let space = r#"{"kind":"tree","tree_branching":2,"truncation_depth":16}"#;
    let a = cat0lab(&["experiment", "quasisymmetry", "--space", space, "--triples", "5", "--format", "csv"]);
    let b = cat0lab(&["experiment", "quasisymmetry", "--space", space, "--triples", "5", "--format", "csv"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 6);
}
