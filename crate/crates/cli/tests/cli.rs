use std::process::{Command, Output};

fn qstancu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qstancu")).args(args).env_remove("QSTANCU_MOMENT_TOL").output().unwrap()
}

#[test]
fn csv_rows_parse_and_pass() {
    let out = qstancu(&["moments", "--n", "5,10", "--q", "0.5,0.9", "--x", "0.5,2", "--lattice-scale", "0.5,2"]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(reader.headers().unwrap(), vec!["n", "q", "function", "norm", "x", "error", "bound", "slack", "pass"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2 * 2 * 2 * 2 * 3);
    for r in &rows {
        assert_eq!(&r[8], "true");
        let err: f64 = r[5].parse().unwrap();
        assert!(err < 1e-8);
    }
}

#[test]
fn json_output_has_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = qstancu(&[
        "compare",
        "--n",
        "5",
        "--q",
        "0.9",
        "--grid-points",
        "11",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["summary"]["all_pass"], serde_json::json!(true));
    assert_eq!(v["config"]["command"], serde_json::json!("compare"));
    assert!(v["rows"].as_array().unwrap().len() > 10);
}

#[test]
fn tolerance_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qstancu"))
        .args(["moments", "--n", "5", "--q", "0.5", "--x", "1"])
        .env("QSTANCU_MOMENT_TOL", "1e-30")
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.split(',').nth(6) == Some("1.00000000000000e-30")));
    let bad =
        Command::new(env!("CARGO_BIN_EXE_qstancu")).args(["moments"]).env("QSTANCU_MOMENT_TOL", "-1").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn invalid_requests_exit_with_two() {
    assert_eq!(qstancu(&["bounds", "--operator", "qsb"]).status.code(), Some(2));
    assert_eq!(qstancu(&["moments", "--n", "10,5"]).status.code(), Some(2));
    assert_eq!(qstancu(&["moments", "--q", "1.5"]).status.code(), Some(2));
}
