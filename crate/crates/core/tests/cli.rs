use std::path::Path;
use std::process::{Command, Output};

use dsmkit::io::{parse_sweep_csv, write_json, MatrixFile, PencilFile};
use dsmkit::linalg::{c, I, ONE, ZERO};
use dsmkit::pencil::scalar_pencil;
use dsmkit::CVec;
use serde_json::Value;
use tempfile::TempDir;

fn dsmkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsmkit"))
        .args(args)
        .env_remove("DSMKIT_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn vector(dir: &Path, name: &str, xs: &[dsmkit::Complex64]) -> String {
    let path = dir.join(format!("{name}.json"));
    write_json(&path, &MatrixFile::from_cvec(&CVec::from_column_slice(xs))).unwrap();
    path.to_str().unwrap().to_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn map_solve_then_verify() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let x = vector(d, "x", &[ONE, ONE]);
    let y = vector(d, "y", &[c(2.0, 0.0)]);
    let z = vector(d, "z", &[ONE]);
    let w = vector(d, "w", &[ONE, ONE]);
    let out = dsmkit(&["map", "solve", "--family", "hermitian", "--x", &x, "--y", &y, "--z", &z, "--w", &w]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["kind"], "dsm");
    assert!((doc["norm_upper"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(doc["exact"], true);

    let result = d.join("result.json");
    std::fs::write(&result, &out.stdout).unwrap();
    let out = dsmkit(&["verify", "--result", s(&result)]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["pass"], true);

    let mut tampered = doc.clone();
    tampered["solution"]["re"][0][0] = Value::from(5.0);
    std::fs::write(&result, serde_json::to_vec(&tampered).unwrap()).unwrap();
    let out = dsmkit(&["verify", "--result", s(&result)]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn single_map_and_infeasible_exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let x = vector(d, "x", &[ONE, ZERO]);
    let y = vector(d, "y", &[c(2.0, 0.0), ONE]);
    let out = dsmkit(&["map", "solve", "--family", "hermitian", "--x", &x, "--y", &y]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["kind"], "map");

    let y = vector(d, "yi", &[I, ZERO]);
    let out = dsmkit(&["map", "solve", "--family", "psd", "--x", &x, "--y", &y]);
    assert_eq!(code(&out), 2);
    let doc = json(&out);
    assert_eq!(doc["feasible"], false);
    assert!(doc["reason"].as_str().unwrap().contains("not positive"));

    let out = dsmkit(&["map", "solve", "--family", "hermitian", "--x", "/nonexistent.json", "--y", &y]);
    assert_eq!(code(&out), 1);
    let out = dsmkit(&["map", "solve", "--family", "bogus", "--x", &x, "--y", &y]);
    assert_ne!(code(&out), 0);
}

#[test]
fn pencil_generation_is_seeded_and_valid() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(code(&dsmkit(&["pencil", "gen", "--n", "4", "--m", "2", "--seed", "9", "-o", s(&a)])), 0);
    let out = Command::new(env!("CARGO_BIN_EXE_dsmkit"))
        .args(["pencil", "gen", "--n", "4", "--m", "2", "-o", s(&b)])
        .env("DSMKIT_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let out = dsmkit(&["pencil", "validate", s(&a)]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 4 && text.lines().all(|l| l.starts_with("PASS")), "{text}");

    assert_eq!(code(&dsmkit(&["pencil", "gen", "--n", "0", "--m", "2", "-o", s(&a)])), 1);
}

#[test]
fn backward_error_single_and_sweep() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let pencil = d.join("p.json");
    write_json(&pencil, &PencilFile::from_pencil(&scalar_pencil(I, 1.0, 1.0, ONE, 1.0))).unwrap();
    let u = vector(d, "u", &[ONE, ONE, ZERO]);
    let out = dsmkit(&["backerr", "--pencil", s(&pencil), "--lambda", "1i", "--u", &u, "--reconstruct"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert!((doc["eta_lower"].as_f64().unwrap() - 3.5f64.sqrt()).abs() < 1e-12);
    assert!((doc["eta_upper"].as_f64().unwrap() - 6f64.sqrt()).abs() < 1e-12);
    assert!(doc["perturbation"].is_object());

    let out = dsmkit(&["backerr", "--pencil", s(&pencil), "--lambda", "1i", "--u", &u, "--blocks", "JR", "--variant", "s"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not implemented"));
    let out = dsmkit(&["backerr", "--pencil", s(&pencil), "--lambda", "0.5", "--u", &u]);
    assert_eq!(code(&out), 1);

    let gen = d.join("g.json");
    assert_eq!(code(&dsmkit(&["pencil", "gen", "--n", "4", "--m", "2", "--seed", "2024", "-o", s(&gen)])), 0);
    let csv = d.join("sweep.csv");
    let lambdas = "0.1380i,0.5100i,0.8950i,1.0480i,1.3210i,1.9080i,2.5080i";
    let out = dsmkit(&["backerr", "sweep", "--pencil", s(&gen), "--lambdas", lambdas, "--seed", "7", "--csv", s(&csv)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = parse_sweep_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.finite && r.eta_lower.unwrap() <= r.eta_upper.unwrap()));
}
