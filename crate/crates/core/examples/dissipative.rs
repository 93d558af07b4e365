//! Dissipative mappings (`Δ + Δ* ⪰ 0`): the single map against the classical
//! candidate, a vector Type-1 map, and the Type-2 doubly structured map.

use dsmkit::dsm::{dsdm_type1_vec, dsdm_type2, DsmProblem};
use dsmkit::linalg::{c, min_eigenvalue};
use dsmkit::maps::{map_min, StructureFamily};
use dsmkit::{CVec, ToleranceConfig};

fn v(xs: &[(f64, f64)]) -> CVec {
    CVec::from_iterator(xs.len(), xs.iter().map(|&(re, im)| c(re, im)))
}

fn main() {
    let cfg = ToleranceConfig::default();

    let x = v(&[(1.0, 0.0), (0.0, 0.0)]);
    let y = v(&[(1.0, 0.0), (1.0, 0.0)]);
    let s = map_min(StructureFamily::Dissipative, &x, &y, &cfg).unwrap();
    let classical = s.classical.as_ref().unwrap();
    println!("single map:  minimal {:.6}  classical {:.6}", s.min_norm, classical.norm());
    println!("             λmin(Δ+Δ*) = {:.3e}", min_eigenvalue(&(&s.minimizer + s.minimizer.adjoint())));

    // Δx = y and Δ*z = w with z = x and w = y: Δ = 1 on the scalar data.
    let e1 = v(&[(1.0, 0.0), (0.0, 0.0)]);
    let t1 = dsdm_type1_vec(&e1, &e1, &e1, &e1, &cfg).unwrap();
    println!("type 1:      ‖𝓗‖_F = {:.6}  hypotheses hold: {}", t1.min_norm, t1.hypotheses_hold);

    let p = DsmProblem::new(v(&[(0.0, 0.0)]), v(&[(1.0, 0.0)]), v(&[(2.0, 0.0)]), v(&[(1.0, 0.0)]), v(&[(1.0, 0.0)]), v(&[(2.0, 0.0)]))
        .unwrap();
    let t2 = dsdm_type2(&p, &cfg).unwrap();
    println!(
        "type 2:      H1 = {}  H2 = {}  norm in [{:.6}, {:.6}]",
        t2.h1[(0, 0)].re, t2.h2[(0, 0)].re, t2.norm_lower, t2.norm_upper
    );

    let flipped = DsmProblem { w1: -&p.w1, ..p.clone() };
    match dsdm_type2(&flipped, &cfg) {
        Ok(_) => println!("type 2 with Re(z*w1) < 0: unexpectedly feasible"),
        Err(e) => println!("type 2 with Re(z*w1) < 0: {e}"),
    }
}
