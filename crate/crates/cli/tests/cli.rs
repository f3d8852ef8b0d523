use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_halflin");

fn halflin(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn example_config(n: u8) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join(format!("../../configs/example{n}.toml"))
        .display()
        .to_string()
}

const CANONICAL: &str = r#"
[equation]
r = "1"
q = "4"
alpha = "1"
sigma = 1
form = "delay"
zeta0 = 2

[simulate]
init = [-1.0, 1.0, -1.0]
horizon = 30
"#;

fn criterion_status(report: &Value, id: &str) -> String {
    report["stages"]["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["criterion"] == id)
        .unwrap_or_else(|| panic!("no {id} entry"))["outcome"]["ok"]["status"]
        .as_str()
        .unwrap()
        .to_string()
}

#[test]
fn check_reports_certified_divergence_for_example_two() {
    let cfg = example_config(2);
    let out = halflin(&["check", "--config", &cfg, "--criterion", "all", "--quiet"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(criterion_status(&report, "Thm22B"), "certified_holds");
    assert!(report["stages"]["simulation"].is_null());
}

#[test]
fn even_numerator_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &CANONICAL.replace("alpha = \"1\"", "alpha = \"2/3\""));
    let out = halflin(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("numerator"), "{err}");
    assert!(err.contains("line 5"), "{err}");
}

#[test]
fn delay_plus_one_needs_positive_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let text = CANONICAL
        .replace("sigma = 1", "sigma = 0")
        .replace("form = \"delay\"", "form = \"delay_plus_one\"");
    let path = write_config(dir.path(), &text);
    let out = halflin(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}

#[test]
fn example_three_flags_the_coefficient_mismatch() {
    let out = halflin(&["example", "3", "--quiet"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = json(&out);
    let ids: Vec<&str> = report["discrepancies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["id"].as_str().unwrap())
        .collect();
    assert!(ids.contains(&"example3_q_tilde"), "{ids:?}");
}

#[test]
fn reports_differ_only_in_timestamp() {
    let cfg = example_config(1);
    let strip = |out: Output| {
        let mut v = json(&out);
        v["timestamp"] = Value::Null;
        v
    };
    let a = strip(halflin(&["run", "--config", &cfg, "--quiet"]));
    let b = strip(halflin(&["run", "--config", &cfg, "--quiet"]));
    assert_eq!(a, b);
    assert_eq!(a["seed"], 20240601);
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let cfg = example_config(2);
    let args = ["check", "--config", &cfg, "--criterion", "Thm22B", "--horizon", "40", "--quiet"];
    let report = json(&halflin(&args));
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let out = halflin(&csv_args);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("criterion_id,zeta,term,partial_sum,running_value"));
    let evidence = report["stages"]["criteria"][0]["outcome"]["ok"]["evidence"].as_array().unwrap();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), evidence.len());
    for (row, ev) in rows.iter().zip(evidence) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], "Thm22B");
        assert_eq!(fields[1].parse::<i64>().unwrap(), ev["zeta"].as_i64().unwrap());
        for (i, key) in [(2, "term"), (3, "partial_sum"), (4, "running_value")] {
            assert_eq!(fields[i].parse::<f64>().unwrap(), ev[key].as_f64().unwrap(), "{row}");
        }
    }
}

#[test]
fn simulate_writes_trajectory_csv_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), CANONICAL);
    let out_path = dir.path().join("traj.csv");
    let out = halflin(&[
        "simulate",
        "--config",
        path.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("zeta,x"));
    for line in lines {
        let (z, x) = line.split_once(',').unwrap();
        let want = if z.parse::<i64>().unwrap() % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(x.parse::<f64>().unwrap(), want);
    }
}

#[test]
fn failing_criterion_exits_with_stage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), CANONICAL);
    // θ diverges when r ≡ 1
    let out = halflin(&["check", "--config", path.to_str().unwrap(), "--criterion", "Thm22B"]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("Thm22B: error"));
}

#[test]
fn lambda0_only_applies_to_example_one() {
    let out = halflin(&["example", "2", "--lambda0", "3"]);
    assert_eq!(code(&out), 1);
    let out = halflin(&["example", "1", "--lambda0", "0.5", "--quiet"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&halflin(&[])), 1);
    assert_eq!(code(&halflin(&["example", "4"])), 1);
    assert_eq!(code(&halflin(&["check"])), 1);
    assert_eq!(code(&halflin(&["--help"])), 0);
}

#[test]
fn missing_config_file_is_a_config_error() {
    let out = halflin(&["validate", "--config", "/nonexistent/run.toml"]);
    assert_eq!(code(&out), 1);
}
