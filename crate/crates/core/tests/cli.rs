use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const JC: &str = "model = dicke\nepsilons = [1.0]\nspins = [0.5]\nG = 0.5\nhbar_omega = 1.0\nN = 1\n";
const RG4: &str =
    "model = rg\nkind = trigonometric\netas = [1, 2, 3, 4]\ndegeneracies = [2, 2, 2, 2]\ng = -0.15\nN = 2\n";

fn gaudin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaudin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn jaynes_cummings_has_two_branches() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "jc.txt", JC);
    let out = dir.path().join("jc.json");
    let run = gaudin(&[
        "--mode",
        "solve-dicke",
        "--spec",
        s(&spec),
        "--branch",
        "all",
        "--out",
        s(&out),
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let doc = json(&out);
    let mut energies: Vec<f64> = doc["branches"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["rayleigh_energy"].as_f64().unwrap())
        .collect();
    energies.sort_by(f64::total_cmp);
    assert_eq!(energies.len(), 2);
    assert!((energies[0] - 0.0).abs() < 1e-10 && (energies[1] - 1.0).abs() < 1e-10);
    for b in doc["branches"].as_array().unwrap() {
        assert!(b["oracle_residual"].as_f64().unwrap() < 1e-10);
    }
    assert_eq!(doc["passed"], Value::Bool(true));
}

#[test]
fn sweep_is_monotone_and_converges() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "rg.txt", RG4);
    let out = dir.path().join("sweep.json");
    let run = gaudin(&["--mode", "sweep-xi", "--spec", s(&spec), "--out", s(&out)]);
    assert_eq!(run.status.code(), Some(0));
    let doc = json(&out);
    let rows = doc["trace"].as_array().unwrap();
    let xi: Vec<f64> = rows.iter().map(|r| r["xi"].as_f64().unwrap()).collect();
    assert_eq!(xi[0], 0.0);
    assert_eq!(*xi.last().unwrap(), 1.0);
    assert!(xi.windows(2).all(|w| w[1] > w[0]));
    assert!(rows.last().unwrap()["max_abs"].as_f64().unwrap() < 1e-10);
}

#[test]
fn verify_accepts_solve_output_and_rejects_tampering() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "rg.txt", RG4);
    let out = dir.path().join("rg.json");
    assert_eq!(
        gaudin(&["--mode", "solve-rg", "--spec", s(&spec), "--out", s(&out)])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(gaudin(&["--mode", "verify", "--spec", s(&out)]).status.code(), Some(0));

    let mut doc = json(&out);
    let re = &mut doc["branches"][0]["rapidities"][1][0];
    *re = Value::from(re.as_f64().unwrap() + 1e-3);
    let tampered = write(&dir, "tampered.json", &serde_json::to_string_pretty(&doc).unwrap());
    let run = gaudin(&["--mode", "verify", "--spec", s(&tampered)]);
    assert_eq!(run.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("equation"), "{stderr}");
}

#[test]
fn structured_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "rg.txt", RG4);
    let a = gaudin(&["--mode", "solve-rg", "--spec", s(&spec), "--branch", "4", "--seed", "7"]);
    let b = gaudin(&[
        "--mode",
        "solve-rg",
        "--spec",
        s(&spec),
        "--branch",
        "4",
        "--seed",
        "7",
        "--parallel-branches",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn invalid_model_is_a_validation_failure() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "bad.txt",
        &JC.replace("[1.0]", "[1.0, 1.0]").replace("[0.5]", "[0.5, 0.5]"),
    );
    let run = gaudin(&["--mode", "solve-dicke", "--spec", s(&spec)]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("levels must be distinct"));
    let run = gaudin(&["--mode", "solve-dicke", "--spec", s(&dir.path().join("missing.txt"))]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn unreachable_seeds_give_a_convergence_failure() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "rg.txt", RG4);
    let run = gaudin(&["--mode", "solve-rg", "--spec", s(&spec), "--occupation", "2,0,0,0"]);
    assert_eq!(run.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(doc["failed_seeds"][0]["status"], "stalled");
}

#[test]
fn spectrum_and_overrides() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "jc.txt", JC);
    let run = gaudin(&[
        "--mode",
        "ed-spectrum",
        "--spec",
        s(&spec),
        "--set",
        "G=0.3",
        "--set",
        "epsilons=[0.5]",
        "--format",
        "tabular",
    ]);
    assert_eq!(run.status.code(), Some(0));
    let text = String::from_utf8(run.stdout).unwrap();
    let sector1: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("H 1 "))
        .map(|l| l.split_whitespace().last().unwrap().parse().unwrap())
        .collect();
    let d = 0.1525_f64.sqrt();
    assert!((sector1[0] - (0.5 - d)).abs() < 1e-10 && (sector1[1] - (0.5 + d)).abs() < 1e-10);
}

#[test]
fn single_copy_family_reaches_the_dicke_roots() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "jc.txt", JC);
    let run = gaudin(&[
        "--mode",
        "solve-dicke",
        "--spec",
        s(&spec),
        "--family",
        "single-copy",
        "--branch",
        "all",
    ]);
    assert_eq!(run.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&run.stdout).unwrap();
    let mut x: Vec<f64> = doc["branches"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["rapidities"][0][0].as_f64().unwrap())
        .collect();
    x.sort_by(f64::total_cmp);
    assert!((x[0] - 0.5).abs() < 1e-10 && (x[1] - 1.5).abs() < 1e-10);
}
