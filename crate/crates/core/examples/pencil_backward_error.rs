//! Structured backward error of an approximate eigenpair of a scalar
//! port-Hamiltonian pencil, with the perturbation that attains it.

use dsmkit::linalg::{c, I, ONE, ZERO};
use dsmkit::pencil::{eta_s, eta_sd, reconstruct_perturbation, scalar_pencil, BlockSelection, EigenPair};
use dsmkit::{CVec, ToleranceConfig};

fn main() {
    let cfg = ToleranceConfig::default();
    let p = scalar_pencil(I, 1.0, 1.0, ONE, 1.0);
    let one = |z| CVec::from_element(1, z);
    let ep = EigenPair::new(c(0.0, 1.0), one(ONE), one(ONE), one(ZERO), &cfg).unwrap();

    for blocks in BlockSelection::ALL {
        let name = blocks.name();
        let b = match eta_sd(&p, &ep, blocks, &cfg) {
            Ok(b) => b,
            Err(e) => {
                println!("{name:<5} {e}");
                continue;
            }
        };
        if !b.finite {
            println!("{name:<5} infinite  ({})", b.conditions_report());
            continue;
        }
        print!("{name:<5} η ∈ [{:.6}, {:.6}]", b.eta_lower, b.eta_upper);
        if let Ok(s) = eta_s(&p, &ep, blocks, &cfg) {
            print!("  symmetric-only {:.6}", s.eta_upper);
        }
        let d = reconstruct_perturbation(&p, &ep, blocks, &b, &cfg).unwrap();
        println!("  attained {:.6}  residual {:.1e}", d.block_norm, d.residual);
    }
}
