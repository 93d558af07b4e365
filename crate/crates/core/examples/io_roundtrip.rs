//! Solve from matrix files, serialize the result, and audit it again the way
//! `dsmkit verify` does.

use dsmkit::io::{read_json, solve_document, to_json, verify_document, write_json, MatrixFile, ResultDocument};
use dsmkit::linalg::c;
use dsmkit::maps::StructureFamily;
use dsmkit::oracle::OracleBudget;
use dsmkit::{CVec, ToleranceConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ToleranceConfig::default();
    let dir = std::env::temp_dir().join("dsmkit-io-example");
    std::fs::create_dir_all(&dir)?;

    let file = |v: &[(f64, f64)]| MatrixFile::from_cvec(&CVec::from_iterator(v.len(), v.iter().map(|&(a, b)| c(a, b))));
    let (x, y) = (file(&[(1.0, 0.0), (1.0, 0.0)]), file(&[(2.0, 0.0)]));
    let (z, w) = (file(&[(1.0, 0.0)]), file(&[(1.0, 0.0), (1.0, 0.0)]));

    let doc = solve_document(StructureFamily::Hermitian, &x, &y, Some((&z, &w)), None, &cfg)?;
    let path = dir.join("result.json");
    write_json(&path, &doc)?;
    println!("wrote {}", path.display());

    let back: ResultDocument = read_json(&path)?;
    let outcome = verify_document(&back, &cfg, &OracleBudget::default())?;
    println!("{}", to_json(&outcome));
    Ok(())
}
