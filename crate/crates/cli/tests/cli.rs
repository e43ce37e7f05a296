use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ltlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltlab")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn small_config(dir: &Path) -> String {
    let base = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/mathieu.json");
    let mut cfg: Value = serde_json::from_str(&std::fs::read_to_string(base).unwrap()).unwrap();
    cfg["discretization"]["n"] = 128.into();
    cfg["bands"]["scan_points"] = 800.into();
    let path = dir.join("small.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn constants_for_p2_d1() {
    let out = ltlab(&["constants", "--p", "2", "--d", "1", "--tau", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["c_integral"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert!((v["weight_integral"].as_f64().unwrap() - std::f64::consts::PI / 16.0).abs() < 1e-12);
    assert_eq!(v["identity_holds"], true);
    assert!(v["omega0"].is_null());

    let out = ltlab(&[
        "constants",
        "--p",
        "2",
        "--d",
        "1",
        "--tau",
        "1",
        "--a1",
        "1",
        "--v0-sup",
        "1",
        "--v-norm",
        "0",
    ]);
    assert_eq!(json(&out)["omega0"]["omega0"].as_f64().unwrap(), -4.0);

    let out = ltlab(&["constants", "--p", "0.4", "--d", "1", "--tau", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exponent"));
}

#[test]
fn distortion_check_from_string_and_from_bands_output() {
    let out = ltlab(&[
        "distortion-check",
        "--bands",
        "1,2;3,4;5,7;8,12",
        "--omega",
        "-10",
        "--samples",
        "2000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["success"], true);
    assert_eq!(v["counts"]["distor3"], 2000);

    let dir = tempfile::tempdir().unwrap();
    let bands = dir.path().join("bands.json");
    let out = ltlab(&["bands", "-o", bands.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = ltlab(&[
        "distortion-check",
        "--bands-file",
        bands.to_str().unwrap(),
        "--omega=0",
        "--re-max",
        "10",
        "--samples",
        "500",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = ltlab(&["distortion-check", "--bands", "1,2", "--omega", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ltlab(&["distortion-check", "--bands", "1,2;x", "--omega", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bands_of_free_and_mathieu() {
    let out = ltlab(&[
        "bands", "--kind", "free", "--shift", "1", "--e-min", "0", "--e-max", "50", "--count", "1",
    ]);
    let v = json(&out);
    let band = v["bands"][0].as_array().unwrap();
    assert!((band[0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((band[1].as_f64().unwrap() - 51.0).abs() < 1e-9);

    let out = ltlab(&["bands", "--e-min", "-1", "--e-max", "5", "--count", "1", "--shift", "3"]);
    let band = json(&out)["bands"][0].clone();
    assert!((band[0].as_f64().unwrap() - (3.0 - 0.455_138_604_1)).abs() < 1e-6);
    assert!((band[1].as_f64().unwrap() - (3.0 - 0.110_248_817_0)).abs() < 1e-6);

    let out = ltlab(&["bands", "--e-min", "-1", "--e-max", "0", "--count", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ltsum_and_spectrum_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let a = ltlab(&["ltsum", "--config", &cfg]);
    let b = ltlab(&["ltsum", "--config", &cfg]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["chain_holds"], true);
    assert!(v["lt_sum_thm1"]["value"].as_f64().unwrap() > 0.0);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 128);

    let half = json(&ltlab(&["ltsum", "--config", &cfg, "--epsilon", "0.5"]));
    assert_eq!(half["epsilon"].as_f64().unwrap(), 0.5);

    let out = ltlab(&["spectrum", "--config", &cfg]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("re,im"));
    assert_eq!(text.lines().count(), 129);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"potential": {"kind": "cosine", "period": 1}}"#).unwrap();
    let out = ltlab(&["ltsum", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid config"));
}

#[test]
fn sweep_reports_slope_and_rejects_ascending_lists() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = ltlab(&["sweep", "--config", &cfg, "--epsilons", "1,0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
    assert!(v["slope"].as_f64().is_some());

    let out = ltlab(&["sweep", "--config", &cfg, "--epsilons", "0.5,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilons"));
}
