use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn wcolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcolab")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (Value, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let mut all = args.to_vec();
    let out = dir.path().to_str().unwrap().to_owned();
    all.extend(["--out", &out, "--csv"]);
    let o = wcolab(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    (v, dir)
}

const HALF: &str = r#"{"kind":"series","coeffs":[0,0.5]}"#;

#[test]
fn classify_uniform() {
    let (v, dir) = report(&["classify", "--weight", "[0.5,0.5]", "--map", HALF]);
    assert_eq!(v["result"]["mode"], "uniform");
    assert_eq!(v["route"], "interior_denjoy_wolff");
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(csv.starts_with("n,norm,norm_minus_P,witness\n"));
    assert_eq!(csv.lines().count(), 51);
}

#[test]
fn construct_writes_weight_and_passes() {
    let (v, dir) = report(&["isometry", "construct", "--map", r#"{"kind":"blaschke","zeros":[[0.5,0]]}"#]);
    assert_eq!(v["test"]["verdict"], "isometry");
    let w: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("weight.json")).unwrap()).unwrap();
    assert_eq!(w["kind"], "rational");
}

#[test]
fn halfplane_norm_pair() {
    let (v, _dir) = report(&["transfer", "halfplane", "--phi", "affine:2,0", "--horizon", "10"]);
    let check = &v["norm_check"];
    assert_eq!(check["formula"]["provenance"], "theorem_certified");
    assert_eq!(check["estimate"]["provenance"], "finite_section");
    let f = check["formula"]["value"].as_f64().unwrap();
    let e = check["estimate"]["value"].as_f64().unwrap();
    assert!((f - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((e - f).abs() < 5e-2);
    assert!(check["estimate"]["delta"].is_number());
    assert_eq!(v["equivalence"]["consistent"], true);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["spectrum", "--weight", "[0.5,0.25]", "--map", r#"{"kind":"rotation","angle":1}"#, "--trunc", "32"];
    let (_, a) = report(&args);
    let (_, b) = report(&args);
    let ra = fs::read(a.path().join("report.json")).unwrap();
    let rb = fs::read(b.path().join("report.json")).unwrap();
    assert_eq!(ra, rb);
    assert_eq!(fs::read(a.path().join("trace.csv")).unwrap(), fs::read(b.path().join("trace.csv")).unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(wcolab(&["classify", "--map", "nonsense"]).status.code(), Some(1));
    assert_eq!(wcolab(&["classify", "--map", HALF, "--tol", "2"]).status.code(), Some(1));
    assert_eq!(wcolab(&["classify"]).status.code(), Some(1));
    let grow = r#"{"kind":"series","coeffs":[0,2]}"#;
    assert_eq!(wcolab(&["classify", "--map", grow]).status.code(), Some(2));
    // Bounded powers with a boundary Denjoy-Wolff point are left open.
    let parabolic = r#"{"kind":"moebius","num":[1,-1],"den":[1,3]}"#;
    let w = r#"{"kind":"rational","num":[0,2],"den":[1,3]}"#;
    let args = ["classify", "--weight", w, "--map", parabolic, "--trunc", "16", "--horizon", "8"];
    assert_eq!(wcolab(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(wcolab(&strict).status.code(), Some(3));
}

#[test]
fn json_to_stdout() {
    let o = wcolab(&["iterate", "--weight", "[0.5,0.5]", "--map", HALF, "--f", "[1,2,3]", "-n", "5", "--json", "--trunc", "16"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["max_path_difference"].as_f64().unwrap() < 1e-10);
}

#[test]
fn smirnoff_probe_fires() {
    let (v, _dir) = report(&[
        "transfer",
        "smirnoff",
        "--beta",
        "[0,1,0.25]",
        "--conjugate",
        r#"{"kind":"moebius","num":[2,1],"den":[1,2]}"#,
        "--horizon",
        "60",
        "--trunc",
        "32",
    ]);
    assert_eq!(v["kernel_probe"]["fired"], true);
}
