use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn catenary(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catenary"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenario(name: &str) -> String {
    scenarios().join(name).to_string_lossy().into_owned()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn passing_scenario_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = catenary(tmp.path(), &["run", &scenario("saddle_bvp.json")]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(tmp.path());
    assert_eq!(r["verdict"], "pass");
    assert!(tmp.path().join("grid.csv").exists());
}

#[test]
fn corrupted_field_exits_one_with_witness() {
    let tmp = tempfile::tempdir().unwrap();
    let out = catenary(tmp.path(), &["run", &scenario("corrupted_field.json")]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(tmp.path());
    let failed: Vec<&Value> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .collect();
    assert!(!failed.is_empty());
    assert!(failed
        .iter()
        .any(|c| c.get("witness").is_some_and(|w| !w.is_null())));
    assert!(String::from_utf8_lossy(&out.stdout).contains("witness"));
}

#[test]
fn missing_field_exits_two_and_names_it() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenarios().join("saddle_bvp.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["block"].as_object_mut().unwrap().remove("delta");
    let path = tmp.path().join("broken.json");
    fs::write(&path, v.to_string()).unwrap();
    let out = catenary(tmp.path(), &["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`delta`"));
}

#[test]
fn suite_code_is_the_worst_scenario() {
    let tmp = tempfile::tempdir().unwrap();
    let out = catenary(tmp.path(), &["suite", &scenario("suite_with_failure.json")]);
    assert_eq!(out.status.code(), Some(1));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("corrupted_field.json"));
    assert!(tmp.path().join("saddle_sum").join("report.json").exists());
}

#[test]
fn empty_suite_warns_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("empty.json");
    fs::write(&path, r#"{"schema": "catenary-suite/1", "scenarios": []}"#).unwrap();
    let out = catenary(tmp.path(), &["suite", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

// Along the orbit of (1, 1) under the saddle, |x| + |y| = e^t + e^-t.
#[test]
fn sum_trace_follows_cosh() {
    let tmp = tempfile::tempdir().unwrap();
    let out = catenary(tmp.path(), &["trace", &scenario("saddle_sum.json")]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut rdr = csv::Reader::from_path(tmp.path().join("trace.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (t_col, l_col) = (col("t"), col("L"));
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let t: f64 = rec[t_col].parse().unwrap();
        let l: f64 = rec[l_col].parse().unwrap();
        assert!(
            (l - 2.0 * t.cosh()).abs() <= 1e-8 * t.cosh(),
            "t = {t}: L = {l}"
        );
        rows += 1;
    }
    assert_eq!(rows, 51);
}

#[test]
fn reruns_are_identical_apart_from_wall_time() {
    let tmp = tempfile::tempdir().unwrap();
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    let mut seen = Vec::new();
    for run in ["a", "b"] {
        let dir = tmp.path().join(run);
        let out = catenary(&dir, &["run", &scenario("shift_catenary.json")]);
        assert_eq!(out.status.code(), Some(0));
        seen.push(strip(report(&dir)));
    }
    assert_eq!(seen[0], seen[1]);
}

#[test]
fn seed_override_is_echoed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = catenary(
        tmp.path(),
        &["--seed", "99", "run", &scenario("shift_catenary.json")],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(tmp.path())["config"]["seed"], 99);
}
