//! Cross-check closed forms against the independent optimization oracle.

use dsmkit::maps::{map_min, StructureFamily};
use dsmkit::oracle::{oracle_eta, oracle_least_norm, oracle_min_structured, OracleBudget, OracleProblem};
use dsmkit::pencil::{eta_sd, gen_eigpair, gen_pencil_with, BlockSelection, PencilOptions, Variant};
use dsmkit::{CMat, CVec, ToleranceConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let cfg = ToleranceConfig::default();
    let budget = OracleBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut rv = |n: usize| CVec::from_fn(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let x = rv(4);
    let a = CMat::from_fn(4, 4, |i, j| Complex64::new((i + 2 * j) as f64 % 3.0 - 1.0, 0.0));

    for family in [StructureFamily::Hermitian, StructureFamily::SkewSymmetric, StructureFamily::Psd] {
        let member = match family {
            StructureFamily::Hermitian => &a + a.adjoint(),
            StructureFamily::SkewSymmetric => &a - a.transpose(),
            _ => &a * a.adjoint(),
        };
        let y = &member * &x;
        let closed = map_min(family, &x, &y, &cfg).unwrap().min_norm;
        let problem = OracleProblem::Map { family, x: x.clone(), y };
        let reference = if family.is_linear() {
            oracle_least_norm(&problem)
        } else {
            oracle_min_structured(&problem, &budget)
        }
        .unwrap();
        println!("{:<15} closed form {closed:.9}  oracle {:.9}", family.name(), reference.norm);
    }

    let p = gen_pencil_with(3, 2, 1, &PencilOptions::default());
    let ep = gen_eigpair(&p, 1, BlockSelection::JRE).unwrap();
    let b = eta_sd(&p, &ep, BlockSelection::JRE, &cfg).unwrap();
    let o = oracle_eta(&p, &ep, BlockSelection::JRE, Variant::Sd, &budget).unwrap();
    println!("JRE backward error: bounds [{:.6}, {:.6}]  oracle {:.6}", b.eta_lower, b.eta_upper, o.norm);
}
