use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn friedrichs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_friedrichs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn help_exits_zero() {
    assert!(friedrichs(&["--help"]).status.success());
    let out = friedrichs(&["spectrum", "--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("--e-min"));
}

#[test]
fn unknown_config_field_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"model": null, "colour": "blue"}"#).unwrap();
    let out = friedrichs(&["--config", cfg.to_str().unwrap(), "bound-states"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_waveguide_parameter_exits_2() {
    let out = friedrichs(&["bound-states", "--n-atoms", "3", "--xi", "0.25"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = friedrichs(&[
        "oracle", "--n-atoms", "3", "--kappa", "0.75", "--xi", "0.25", "--site", "1", "--t-max", "50", "--n-trunc",
        "10", "--out", d,
    ]);
    assert_eq!(out.status.code(), Some(3));
    let diag: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("error.json")).unwrap()).unwrap();
    assert_eq!(diag["kind"], "numerical");
}

#[test]
fn waveguide_document_round_trips_through_bound_states() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = friedrichs(&["waveguide", "--n-atoms", "3", "--kappa", "0.75", "--xi", "0.25", "--site", "2", "--out", d]);
    assert!(out.status.success());
    let model = dir.path().join("waveguide.json");
    let out = friedrichs(&["bound-states", "--model", model.to_str().unwrap(), "--out", d]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("bound_states.json")).unwrap()).unwrap();
    assert_eq!(v["census"]["m_bic"], 1);
    assert_eq!(v["waveguide_census"]["m_bic"], 1);
    let e = v["states"][0]["energy"].as_f64().unwrap();
    assert!(e.abs() < 1e-12);
}

#[test]
fn generic_model_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    fs::write(
        &model,
        r#"{
            "levels": [-0.5, 0.5],
            "couplings": [0.3, [0.0, 0.2]],
            "band": {"low": -1.0, "up": 1.0},
            "density": {"kind": "flat", "value": 1.0},
            "initial": [1.0, 0.0]
        }"#,
    )
    .unwrap();
    let d = dir.path().to_str().unwrap();
    let out = friedrichs(&["spectrum", "--model", model.to_str().unwrap(), "--points", "11", "--out", d]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "E,Sigma_or_Delta,Gamma,K,Kprime");
    assert_eq!(rows.len(), 12);
}

#[test]
fn reproduce_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = friedrichs(&["reproduce", "all", "--out", dir.path().to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (fa, fb) = (read_dir_sorted(a.path()), read_dir_sorted(b.path()));
    assert_eq!(fa.len(), 13);
    assert!(fa == fb, "reproduce output differs between runs");
}
