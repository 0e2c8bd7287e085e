use std::process::{Command, Output};

use qfi_bounds::cli::{run, EXIT_BAD_ARGS, EXIT_OK, EXIT_TRUNCATION};
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfi-bounds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn in_process(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("qfi-bounds").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn point_coherent_closed_form() {
    let out = bin(&[
        "point", "--state", "coherent", "--N", "1", "--beta2", "0.125", "--output", "json",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let rows: Value = serde_json::from_slice(&out.stdout).unwrap();
    let row = &rows[0];
    assert_eq!(row["lambda_opt"], 0.5);
    assert_eq!(row["cq_parametric_opt"], 2.0);
    let oracle = row["qfi_oracle"].as_f64().unwrap();
    let variational = row["qfi_variational"].as_f64().unwrap();
    assert!((oracle - variational).abs() < 1e-8);
    assert!(oracle <= 2.0);
    assert_eq!(row["wall_time_ms"], Value::Null);
}

#[test]
fn point_fock_has_no_phase_information() {
    let out = bin(&["point", "--state", "fock", "--n", "3", "--beta2", "0.1"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    assert!(text.contains("zero_variance"));
}

#[test]
fn truncation_exit_code() {
    let out = bin(&[
        "point",
        "--state",
        "squeezed_vacuum",
        "--N",
        "4",
        "--cutoff",
        "10",
        "--beta2",
        "0.01",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_TRUNCATION));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("at least"), "{err}");
}

#[test]
fn bad_arguments_exit_code() {
    for args in [
        vec!["point", "--state", "coherent", "--beta2", "0.1"],
        vec!["frobnicate"],
        vec!["point", "--state", "coherent", "--N", "-1"],
        vec!["scan", "--output", "xml"],
        vec!["fig1", "--N", "5", "--resolution", "3"],
        vec!["scan", "--config", "/nonexistent/qfi-bounds.toml"],
    ] {
        let out = bin(&args);
        assert_eq!(out.status.code(), Some(EXIT_BAD_ARGS), "{args:?}");
    }
    assert_eq!(bin(&["--help"]).status.code(), Some(EXIT_OK));
}

#[test]
fn validate_passes() {
    let out = bin(&["validate", "--seed", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK), "{text}");
    assert!(text.contains("0 failed"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn scan_is_deterministic() {
    let args = [
        "scan",
        "--state",
        "displaced_squeezed",
        "--N",
        "1,3",
        "--beta2",
        "0.01,0.1",
        "--seed",
        "7",
    ];
    let a = bin(&args);
    let b = bin(&args);
    assert_eq!(a.status.code(), Some(EXIT_OK));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(csv_rows(&String::from_utf8(a.stdout).unwrap()).len(), 4);
}

#[test]
fn csv_and_json_agree() {
    let base = [
        "scan",
        "--state",
        "coherent",
        "--N",
        "0.5,2",
        "--beta2",
        "0.001,0.1",
    ];
    let (code, csv_text, _) = in_process(&base);
    assert_eq!(code, EXIT_OK);
    let mut json_args = base.to_vec();
    json_args.extend(["--output", "json"]);
    let (code, json_text, _) = in_process(&json_args);
    assert_eq!(code, EXIT_OK);

    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    let json: Value = serde_json::from_str(&json_text).unwrap();
    let json = json.as_array().unwrap();
    let records: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), json.len());
    for (record, obj) in records.iter().zip(json) {
        let keys: Vec<&String> = obj.as_object().unwrap().keys().collect();
        assert_eq!(keys, header.iter().collect::<Vec<_>>());
        for (field, text) in header.iter().zip(record.iter()) {
            match &obj[field] {
                Value::Number(n) => {
                    assert_eq!(n.as_f64().unwrap(), text.parse::<f64>().unwrap(), "{field}")
                }
                Value::String(s) => assert_eq!(s, text, "{field}"),
                Value::Null => assert!(matches!(text, "nan" | "inf" | "-inf"), "{field}"),
                other => panic!("unexpected {other}"),
            }
        }
    }
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.toml");
    std::fs::write(
        &config,
        "state_family = \"squeezed_vacuum\"\nN_grid = [1.0, 2.0]\nbeta2_grid = [0.01]\noutput_format = \"json\"\n",
    )
    .unwrap();
    let out_path = dir.path().join("rows.csv");
    let out = bin(&[
        "scan",
        "--config",
        config.to_str().unwrap(),
        "--N",
        "3",
        "--output",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(out.stdout.is_empty());
    let rows = csv_rows(&std::fs::read_to_string(&out_path).unwrap());
    assert_eq!(rows.len(), 1);
    assert!(rows[0][0].starts_with("squeezed_vacuum"));
    assert_eq!(&rows[0][1], "3.0");
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "beta_squared = [0.1]\n").unwrap();
    let out = bin(&["scan", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_BAD_ARGS));
}

#[test]
fn fig1_small_grid() {
    let (code, text, _) = in_process(&[
        "fig1", "--N", "2,8", "--beta2", "0.0005", "--output", "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let rows: Value = serde_json::from_str(&text).unwrap();
    for row in rows.as_array().unwrap() {
        let best = row["qfi_best_gaussian"].as_f64().unwrap();
        let cap = row["cq_max"].as_f64().unwrap();
        assert!(best <= cap * (1.0 + 1e-6));
        assert_eq!(row["flags"], "");
    }
}
