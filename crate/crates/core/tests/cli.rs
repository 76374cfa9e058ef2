use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn asylat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asylat"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run asylat")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const IDENTITY_JOB: &str = r#"{
  "region": {"min": [0, 0], "max": [1, 1], "inner_margin": 0.1},
  "chart": {"jet": {"domain": {"min": [0, 0], "max": [1, 1]}, "terms": [{"degree": 1, "x": [0, 1, 0], "y": [0, 0, 1]}]}},
  "hbars": [0.25]
}"#;

const POLAR_JOB: &str = r#"{
  "region": {"min": [0, 0], "max": [1, 1], "inner_margin": 0.1},
  "chart": {"model": {"model": "polar_action", "param": 1.0, "domain": {"min": [0, -0.6], "max": [1, 1]}}},
  "hbars": [0.1, 0.07, 0.05],
  "noise": {"order": 3, "amplitude": 1.0, "seed": 3}
}"#;

fn generated(job: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("job.json"), job).unwrap();
    let o = asylat(dir.path(), &["generate", "--config", "job.json", "--out", "lattice.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    dir
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn generate_identity_quarter_grid() {
    let dir = generated(IDENTITY_JOB);
    let lat = read_json(&dir.path().join("lattice.json"));
    assert_eq!(lat["slices"][0]["points"].as_array().unwrap().len(), 25);
    let truth = read_json(&dir.path().join("lattice.truth.json"));
    assert_eq!(truth["slices"][0]["labels"].as_array().unwrap().len(), 25);
}

#[test]
fn generate_harmonic_pair() {
    let job = r#"{
  "region": {"min": [0, 0], "max": [1, 1], "inner_margin": 0.1},
  "chart": {"model": {"model": "harmonic_pair", "domain": {"min": [0, 0], "max": [1, 1]}}},
  "hbars": [0.25]
}"#;
    let dir = generated(job);
    let lat = read_json(&dir.path().join("lattice.json"));
    // ħ(m+½) for m = 0..3 in each coordinate
    let pts = lat["slices"][0]["points"].as_array().unwrap();
    assert_eq!(pts.len(), 16);
    assert!(pts.iter().any(|p| p[0].as_f64() == Some(0.125) && p[1].as_f64() == Some(0.875)));
}

#[test]
fn malformed_config_reports_the_offset() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("job.json"), "{\"region\": {\"min\": [0, 0],, }").unwrap();
    let o = asylat(dir.path(), &["generate", "--config", "job.json", "--out", "lattice.json"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("byte offset 26"), "{}", stderr(&o));
    assert!(!dir.path().join("lattice.json").exists());
}

#[test]
fn unknown_fields_are_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    let job = IDENTITY_JOB.replace("\"hbars\"", "\"hbar_list\"");
    std::fs::write(dir.path().join("job.json"), job).unwrap();
    let o = asylat(dir.path(), &["generate", "--config", "job.json", "--out", "lattice.json"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("hbar_list"), "{}", stderr(&o));
}

#[test]
fn label_recover_verify_round_trip() {
    let dir = generated(POLAR_JOB);
    let d = dir.path();
    let o = asylat(d, &["label", "lattice.json", "--out", "labelling.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = asylat(d, &["verify", "labelling.json", "lattice.truth.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.matches("equivalent, witness").count(), 3, "{stdout}");

    let o = asylat(
        d,
        &["recover", "lattice.json", "labelling.json", "--out", "report.json", "--reference", "lattice.truth.json"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = read_json(&d.join("report.json"));
    assert_eq!(report["residuals"].as_array().unwrap().len(), 3);
    // ρ = −x in the ground-truth basis
    for r in report["reference"]["rotation"].as_array().unwrap() {
        let x = r["point"][0].as_f64().unwrap();
        let rho = r["rho"].as_f64().unwrap();
        assert!((rho + x).abs() < 0.05, "x {x}: rho {rho}");
    }
}

#[test]
fn verify_rejects_negated_labels() {
    let dir = generated(POLAR_JOB);
    let d = dir.path();
    assert_eq!(code(&asylat(d, &["label", "lattice.json", "--out", "labelling.json"])), 0);
    let mut lab = read_json(&d.join("labelling.json"));
    for s in lab["slices"].as_array_mut().unwrap() {
        for e in s["entries"].as_array_mut().unwrap() {
            let k1 = e["k"][0].as_i64().unwrap();
            e["k"][0] = Value::from(-k1);
        }
    }
    std::fs::write(d.join("negated.json"), serde_json::to_vec(&lab).unwrap()).unwrap();
    let o = asylat(d, &["verify", "negated.json", "lattice.truth.json"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("NOT equivalent"));

    std::fs::write(d.join("empty.json"), "").unwrap();
    let o = asylat(d, &["verify", "empty.json", "lattice.truth.json"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("byte offset 0"), "{}", stderr(&o));
}

#[test]
fn recover_reports_underdetermined_fits() {
    let dir = generated(IDENTITY_JOB);
    let d = dir.path();
    assert_eq!(code(&asylat(d, &["label", "lattice.json", "--out", "labelling.json"])), 0);
    // 9 labelled points cannot fix a degree 4 map
    let o = asylat(d, &["recover", "lattice.json", "labelling.json", "--out", "report.json", "--degree", "4"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(!d.join("report.json").exists());
}

#[test]
fn label_reports_sparse_input() {
    let dir = tempfile::tempdir().unwrap();
    let lattice = r#"{"region": {"min": [0, 0], "max": [1, 1], "inner_margin": 0.1},
        "slices": [{"hbar": 0.5, "points": [[0.5, 0.5], [0.0, 0.0], [1.0, 1.0]]}]}"#;
    std::fs::write(dir.path().join("lattice.json"), lattice).unwrap();
    let o = asylat(dir.path(), &["label", "lattice.json", "--out", "labelling.json"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn plot_is_deterministic() {
    let dir = generated(IDENTITY_JOB);
    let d = dir.path();
    assert_eq!(code(&asylat(d, &["label", "lattice.json", "--out", "labelling.json"])), 0);
    for out in ["a.svg", "b.svg"] {
        let o = asylat(d, &["plot", "lattice.json", "labelling.json", "--out", out]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let a = std::fs::read_to_string(d.join("a.svg")).unwrap();
    assert_eq!(a, std::fs::read_to_string(d.join("b.svg")).unwrap());
    assert_eq!(a.matches("<circle").count(), 25);
    assert_eq!(a.matches(">(0,0)<").count(), 1);
    assert_eq!(a.matches(">(").count(), 9);
}

#[test]
fn export_writes_one_row_per_point() {
    let dir = generated(IDENTITY_JOB);
    let d = dir.path();
    assert_eq!(code(&asylat(d, &["label", "lattice.json", "--out", "labelling.json"])), 0);
    let o = asylat(d, &["export", "lattice.json", "--labelling", "labelling.json", "--out", "points.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(d.join("points.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 25);
    let k1 = headers.iter().position(|h| h == "k1").unwrap();
    assert_eq!(rows.iter().filter(|r| !r[k1].is_empty()).count(), 9);
}
