use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use entropy_lab::cli::scan_csv;
use entropy_lab::csv_io::{read_scan, CsvOptions, EntropyUnit};
use entropy_lab::runner::ScanConfig;
use entropy_lab_core::scaling::{cantor_depth_policy, geometric_grid, ScanMode};
use entropy_lab_core::{CantorSpec, SymbolFunction};
use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    lab_with_threads(args, None)
}

fn lab_with_threads(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_entropy-lab"));
    cmd.args(args).env_remove("ENTROPY_LAB_THREADS");
    if let Some(t) = threads {
        cmd.env("ENTROPY_LAB_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn scan_half_interval_rows() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "half.json", r#"{"version":1,"type":"intervals","intervals":[[0,0.5]]}"#);
    let out = lab(&["scan", "--set", s(&spec), "--nmin", "1", "--nmax", "2", "--ratio", "2", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = read_scan(stdout(&out).as_bytes()).unwrap();
    let r = &table.records;
    assert_eq!(r.len(), 2);
    assert!((r[0].entropy.unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
    assert_eq!(r[0].proxy, 0.25);
    assert!((r[1].entropy.unwrap() - 0.947_893_3).abs() < 1e-5);
    assert!((r[1].proxy - 0.297_357).abs() < 1e-6);
    let text = stdout(&out);
    let first_row = text.lines().nth(1).unwrap();
    assert_eq!(first_row, "1,6.9314718055994529e-1,2.5000000000000000e-1,,,");

    let bits = lab(&["scan", "--set", s(&spec), "--nmax", "1", "--bits", "--no-timing"]);
    assert_eq!(stdout(&bits).lines().collect::<Vec<_>>()[..2], ["N,S_N_bits,P_N,S_over_logN,P_over_logN,wall_ms", "1,1.0000000000000000e0,2.5000000000000000e-1,,,"]);
}

#[test]
fn scan_full_torus_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "full.json", r#"{"version":1,"type":"intervals","intervals":[[0,1]]}"#);
    let out = lab(&["scan", "--set", s(&spec), "--nmax", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let table = read_scan(stdout(&out).as_bytes()).unwrap();
    assert!(table.records.iter().all(|r| r.entropy == Some(0.0) && r.proxy == 0.0));
    assert!(table.records.iter().all(|r| r.wall_ms >= 0.0));
}

#[test]
fn cantor_round_trip_is_bit_identical_to_in_process_scan() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("cantor.json");
    let out = lab(&["cantor", "--q", "0.25", "--a", "1", "--depth", "auto", "--nmax", "256", "--out", s(&spec)]);
    assert_eq!(out.status.code(), Some(0));
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(&spec).unwrap()).unwrap();
    assert_eq!(meta["metadata"]["predicted_alpha"], 0.5);
    assert_eq!(meta["metadata"]["depth"], 4);

    let csv = dir.path().join("scan.csv");
    let args = ["--nmin", "1", "--nmax", "256", "--mode", "both", "--eig-cap", "128", "--no-timing"];
    let out = lab(&[&["scan", "--set", s(&spec), "--out", s(&csv)][..], &args].concat());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let from_cli = std::fs::read_to_string(&csv).unwrap();

    let base = CantorSpec::new(0.25, 1.0, 0).unwrap();
    let set = base.with_depth(cantor_depth_policy(&base, 256).unwrap()).generate().unwrap();
    let cfg = ScanConfig {
        grid: geometric_grid(1, 256, std::f64::consts::SQRT_2).unwrap(),
        mode: ScanMode::Both,
        eigen_cap: 128,
        threads: Some(2),
    };
    let opts = CsvOptions { unit: EntropyUnit::Nats, timing: false };
    let (in_process, _) = scan_csv(&SymbolFunction::indicator(&set), &cfg, opts).unwrap();
    assert_eq!(from_cli, in_process);

    // the unexpanded cantor spec resolves to the same set
    let direct = write(dir.path(), "c.json", r#"{"version":1,"type":"cantor","q":0.25,"a":1,"depth":"auto"}"#);
    let out = lab(&[&["scan", "--set", s(&direct)][..], &args].concat());
    assert_eq!(stdout(&out), in_process);

    let table = read_scan(in_process.as_bytes()).unwrap();
    assert!(table.records.windows(2).all(|w| w[1].proxy >= w[0].proxy));
    assert!(table.records.iter().filter(|r| r.n > 128).all(|r| r.entropy.is_none()));
}

#[test]
fn output_is_stable_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "k.json", r#"{"version":1,"type":"intervals","intervals":[[0.1,0.3],[0.45,0.9]]}"#);
    let args = ["scan", "--set", s(&spec), "--nmax", "300", "--ratio", "1.2", "--no-timing"];
    let one = lab_with_threads(&args, Some("1"));
    assert_eq!(one.status.code(), Some(0));
    for t in ["2", "5"] {
        assert_eq!(stdout(&lab_with_threads(&args, Some(t))), stdout(&one));
    }
    assert_eq!(stdout(&lab(&args)), stdout(&one));
    assert_eq!(lab_with_threads(&args, Some("zero")).status.code(), Some(1));
}

#[test]
fn bad_inputs_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let specs = [
        r#"{"version":1,"type":"intervals","intervals":[[0,0.5]],"extra":1}"#,
        r#"{"version":2,"type":"intervals","intervals":[[0,0.5]]}"#,
        r#"{"type":"intervals","intervals":[[0,0.5]]}"#,
        r#"{"version":1,"type":"cantor","q":0.6,"a":1,"depth":2}"#,
        r#"{"version":1,"type":"intervals","intervals":[[0.2,0.2]]}"#,
        "not json",
    ];
    for (i, text) in specs.iter().enumerate() {
        let spec = write(dir.path(), &format!("bad{i}.json"), text);
        let out = lab(&["scan", "--set", s(&spec), "--nmax", "4"]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(!out.stderr.is_empty());
    }
    let ok = write(dir.path(), "ok.json", r#"{"version":1,"type":"intervals","intervals":[[0,0.5]]}"#);
    assert_eq!(lab(&["scan", "--set", s(&ok), "--mode", "entropy", "--nmax", "64", "--eig-cap", "32"]).status.code(), Some(1));
    assert_eq!(lab(&["scan", "--set", s(&ok), "--ratio", "1"]).status.code(), Some(1));
    assert_eq!(lab(&["scan", "--set", "/nonexistent/spec.json"]).status.code(), Some(1));
    assert_eq!(lab(&["scan", "--bogus-flag"]).status.code(), Some(1));
    assert_eq!(lab(&["cantor", "--q", "0.6"]).status.code(), Some(1));
    assert_eq!(lab(&["fermi", "--set", s(&ok)]).status.code(), Some(1));
    assert_eq!(lab(&["--help"]).status.code(), Some(0));
}

#[test]
fn cantor_depth_one_example() {
    let out = lab(&["cantor", "--q", "0.25", "--a", "1", "--depth", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["version"], 1);
    assert_eq!(v["type"], "intervals");
    assert_eq!(v["intervals"], serde_json::json!([[0.0, 0.375], [0.625, 1.0]]));
    assert_eq!(v["metadata"]["truncated_measure"], 0.75);
}

#[test]
fn fermi_command_writes_the_sea() {
    let dir = tempfile::tempdir().unwrap();
    let samples: Vec<[f64; 2]> = (0..256)
        .map(|i| {
            let t = i as f64 / 256.0;
            [t, (2.0 * std::f64::consts::PI * t).cos()]
        })
        .collect();
    let spec = write(
        dir.path(),
        "band.json",
        &serde_json::json!({"version": 1, "type": "fermi", "samples": samples, "filling": 0.5}).to_string(),
    );
    let out = lab(&["fermi", "--set", s(&spec)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let iv = v["intervals"].as_array().unwrap();
    assert_eq!(iv.len(), 1);
    assert!((iv[0][0].as_f64().unwrap() - 0.25).abs() < 1e-9);
    assert!((iv[0][1].as_f64().unwrap() - 0.75).abs() < 1e-9);
    assert_eq!(v["metadata"]["filling"], 0.5);
    // the written spec is itself scannable
    let sea = write(dir.path(), "sea.json", &stdout(&out));
    assert_eq!(lab(&["scan", "--set", s(&sea), "--nmax", "8"]).status.code(), Some(0));
}

#[test]
fn fit_recovers_synthetic_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("N,S_N_nats,P_N,S_over_logN,P_over_logN,wall_ms\n");
    for k in 3..=12 {
        let n = 1u64 << k;
        text.push_str(&format!("{n},,{:.16e},,,\n", 2.0 * (n as f64).powf(0.5)));
    }
    let csv = write(dir.path(), "power.csv", &text);
    let cantor = write(dir.path(), "c.json", r#"{"version":1,"type":"cantor","q":0.25,"a":1,"depth":"auto"}"#);
    let out = lab(&["fit", "--csv", s(&csv), "--set", s(&cantor), "--window", "16:"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let power = &v["fits"]["P_N"]["power"]["params"];
    assert!((power["exponent"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert!((power["prefactor"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(v["predicted_alpha"], 0.5);
    assert_eq!(v["passed"], true);

    let third = write(dir.path(), "t.json", r#"{"version":1,"type":"cantor","q":0.1,"a":1,"depth":"auto"}"#);
    let miss = lab(&["fit", "--csv", s(&csv), "--set", s(&third)]);
    assert_eq!(miss.status.code(), Some(2));

    let broken = write(dir.path(), "broken.csv", "N,S_N_nats,P_N,S_over_logN,P_over_logN,wall_ms\n8,,oops,,,\n");
    assert_eq!(lab(&["fit", "--csv", s(&broken)]).status.code(), Some(1));
    assert_eq!(lab(&["fit", "--csv", s(&csv), "--window", "100000:"]).status.code(), Some(1));
    assert_eq!(lab(&["fit", "--csv", s(&csv), "--window", "9"]).status.code(), Some(1));
}

#[test]
fn verify_reports_all_suites() {
    let out = lab(&["verify", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, entropy_lab::verify::SUITES);
    let c = v["suites"][6]["constants"]["c_N256"].as_f64().unwrap();
    assert!(c > 0.0 && c <= 2.0);

    let one = lab(&["verify", "--suite", "anchors"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(lab(&["verify", "--suite", "nonsense"]).status.code(), Some(1));
}
