//! Minimal-norm `Δx = y` in every structure family, for one fixed pair.
//!
//! ```sh
//! cargo run -p dsmkit --example single_maps
//! ```

use dsmkit::linalg::c;
use dsmkit::maps::{map_min, structure_deviation, StructureFamily};
use dsmkit::{CMat, CVec, ToleranceConfig};

fn main() {
    let cfg = ToleranceConfig::default();
    let x = CVec::from_column_slice(&[c(1.0, 0.0), c(0.0, 1.0), c(1.0, -1.0)]);

    println!("{:<17} {:>10} {:>10}  note", "family", "‖Δ‖_F", "residual");
    for family in StructureFamily::ALL {
        // y = Ax for a fixed member A of the family, so every case is feasible.
        let a = CMat::from_fn(3, 3, |i, j| c(1.0 + i as f64 - j as f64, (i * j) as f64 / 2.0));
        let g = CMat::from_fn(3, 3, |i, j| c(if i == j { 1.0 } else { 0.3 }, 0.0));
        let gg = &g * g.adjoint();
        let member = match family {
            StructureFamily::Unstructured => a.clone(),
            StructureFamily::Hermitian => &a + a.adjoint(),
            StructureFamily::SkewHermitian => &a - a.adjoint(),
            StructureFamily::Symmetric => &a + a.transpose(),
            StructureFamily::SkewSymmetric => &a - a.transpose(),
            StructureFamily::Psd => gg,
            StructureFamily::Nsd => -gg,
            StructureFamily::Dissipative => gg + &a - a.adjoint(),
            StructureFamily::AntiDissipative => -gg + &a - a.adjoint(),
        };
        let y = &member * &x;
        match map_min(family, &x, &y, &cfg) {
            Ok(sol) => {
                let res = (&sol.minimizer * &x - &y).norm();
                let (dev, _) = structure_deviation(family, &sol.minimizer);
                let mut note = format!("structure dev {dev:.1e}");
                if let Some(classical) = &sol.classical {
                    note += &format!(", classical candidate {:.4}", classical.norm());
                }
                println!("{:<17} {:>10.6} {:>10.1e}  {note}  (‖A‖_F = {:.4})", family.name(), sol.min_norm, res, member.norm());
            }
            Err(e) => println!("{:<17} {:>10} {:>10}  {e}", family.name(), "-", "-"),
        }
    }
}
