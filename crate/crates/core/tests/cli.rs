use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bodies() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../bodies")
}

fn body(name: &str) -> String {
    bodies().join(name).to_string_lossy().into_owned()
}

fn rieszcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rieszcap")).args(args).output().unwrap()
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let out = rieszcap(args);
    let code = out.status.code().unwrap();
    let value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, value)
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn capacity_reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let out = rieszcap(&[
            "capacity", "--body", &body("disk.json"), "--alpha", "1", "--resolution", "500", "--seed", "7",
            "--output", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(read(&a), read(&b));
    let report: Value = serde_json::from_slice(&read(&a)).unwrap();
    for key in ["config", "records", "pass", "runtime_seconds", "version"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert!(report["runtime_seconds"].is_null());
    assert_eq!(report["config"]["command"]["resolution"], 500);
    assert_eq!(report["config"]["seed"], 7);
}

#[test]
fn bm_example_produces_three_records() {
    let (code, report) = json_report(&[
        "bm", "--k0", &body("square.json"), "--k1", &body("disk.json"), "--alpha", "1", "--lambdas", "0.25,0.5,0.75",
        "--resolution", "300",
    ]);
    assert_eq!(code, 0);
    let records = report["records"].as_array().unwrap();
    assert_eq!(records.len(), 3);
    for r in records {
        assert!(r["values"]["capacity_lambda"].as_f64().unwrap() > 0.0);
        assert!(r["values"]["deficit_power"].is_number() && r["values"]["deficit_min"].is_number());
    }
    assert_eq!(report["exploratory"], false);
}

#[test]
fn usage_errors_exit_with_two() {
    let out = rieszcap(&["bm", "--k0", &body("square.json"), "--k1", &body("disk.json"), "--alpha", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));

    let out = rieszcap(&["capacity", "--body", r#"{"dim": 2, "kind": "ball", "center": [0, 0]}"#, "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radius"));

    assert_eq!(rieszcap(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(rieszcap(&["capacity", "--body", "/nonexistent.json", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(rieszcap(&["capacity", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(rieszcap(&["--help"]).status.code(), Some(0));
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_rieszcap"))
        .args(["capacity", "--body", &body("disk.json"), "--alpha", "1", "--resolution", "100"])
        .env("RCL_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_rieszcap"))
        .args(["capacity", "--body", &body("disk.json"), "--alpha", "1", "--resolution", "100"])
        .env("RCL_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["threads"], 2);
}

#[test]
fn harness_failure_exits_with_one() {
    let out = rieszcap(&["levelset", "--two-bump"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solver_failure_exits_with_three() {
    let out = rieszcap(&[
        "capacity", "--body", &body("square.json"), "--alpha", "1", "--resolution", "200", "--solver", "frank-wolfe",
        "--max-iterations", "3", "--tolerance", "1e-12",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let common = ["continuity", "--body", &body("disk.json"), "--epsilons", "0.2,0.1", "--resolution", "200"];
    let (code, json) = json_report(&common);
    assert_eq!(code, 0);
    let csv_out = rieszcap(&[&common[..], &["--format", "csv"]].concat());
    let text = String::from_utf8(csv_out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let records = json["records"].as_array().unwrap();
    assert_eq!(rows.len(), records.len());
    // The JSON text of each float is the CSV cell, character for character.
    let raw = serde_json::to_string(&json).unwrap();
    for (row, rec) in rows.iter().zip(records) {
        assert_eq!(&row[0], rec["case"].as_str().unwrap());
        for (col, name) in header.iter().enumerate().skip(6) {
            match rec["values"].get(name) {
                Some(v) => assert_eq!(row[col].parse::<f64>().unwrap(), v.as_f64().unwrap()),
                None => assert!(row[col].is_empty()),
            }
        }
        assert_eq!(row[3].parse::<f64>().unwrap(), rec["measured"].as_f64().unwrap());
    }
    let stdout = rieszcap(&common).stdout;
    let first_measured = &rows[0][3];
    assert!(String::from_utf8(stdout).unwrap().contains(first_measured), "{first_measured} not in {raw}");
}

#[test]
fn measure_export_sums_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("measure.csv");
    let out = rieszcap(&[
        "capacity", "--body", &body("triangle.json"), "--alpha", "1.5", "--resolution", "200", "--measure-out",
        path.to_str().unwrap(), "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), ["x0", "x1", "weight", "mass"]);
    let total: f64 = reader.records().map(|r| r.unwrap()[3].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn fraclap_and_extension_subcommands() {
    let (code, report) = json_report(&["fraclap", "--function", "gaussian"]);
    assert_eq!(code, 0);
    assert!(report["records"][0]["measured"].as_f64().unwrap() < 2e-2);
    let (code, report) = json_report(&[
        "extension", "--body", &body("disk.json"), "--resolution", "300", "--point", "2,0", "--point", "-1.5,0.5",
        "--heights", "0,0.5", "--fd-steps", "0.1,0.05",
    ]);
    assert_eq!(code, 0);
    assert_eq!(report["records"].as_array().unwrap().len(), 4);
}

#[test]
fn isoperimetric_names_members_after_files() {
    let (code, report) = json_report(&[
        "isoperimetric", "--body", &body("disk.json"), "--body", &format!("sq={}", body("square.json")),
        "--mean-width", "2", "--resolutions", "300,400",
    ]);
    assert_eq!(code, 0);
    let cases: Vec<&str> = report["records"].as_array().unwrap().iter().map(|r| r["case"].as_str().unwrap()).collect();
    assert!(cases.contains(&"body disk") && cases.contains(&"body sq"));
}
