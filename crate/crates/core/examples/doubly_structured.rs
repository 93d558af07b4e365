//! Doubly structured mappings: `[Δ1 Δ2]x = y`, `[Δ1 Δ2]*z = w` with `Δ1`
//! Hermitian, first on tiny hand-checkable data, then on a random instance
//! where only a norm bracket is available.

use dsmkit::dsm::{dsm_solve, DsmProblem};
use dsmkit::linalg::c;
use dsmkit::maps::{map_two_sided, StructureFamily};
use dsmkit::{CMat, CVec, ToleranceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn v(xs: &[(f64, f64)]) -> CVec {
    CVec::from_iterator(xs.len(), xs.iter().map(|&(re, im)| c(re, im)))
}

fn main() {
    let cfg = ToleranceConfig::default();

    // x1 = z, so the Hermitian candidate is provably minimal.
    let p = DsmProblem::new(v(&[(1.0, 0.0)]), v(&[(1.0, 0.0)]), v(&[(2.0, 0.0)]), v(&[(1.0, 0.0)]), v(&[(1.0, 0.0)]), v(&[(1.0, 0.0)]))
        .unwrap();
    let s = dsm_solve(StructureFamily::Hermitian, &p, &cfg).unwrap();
    println!("scalar data: H1 = {}, H2 = {}, ‖H‖_F = {:.6} (exact: {}, {})",
        s.h1[(0, 0)].re, s.h2[(0, 0)].re, s.norm_upper, s.exact, s.sufficiency_note());

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (n, m) = (4, 2);
    let mut rnd = |r: usize, k: usize| CMat::from_fn(r, k, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let a = rnd(n, n);
    let d1 = &a + a.adjoint();
    let d2 = rnd(n, m);
    let x1: CVec = rnd(n, 1).column(0).into();
    let x2: CVec = rnd(m, 1).column(0).into();
    let z: CVec = rnd(n, 1).column(0).into();
    let y = &d1 * &x1 + &d2 * &x2;
    let p = DsmProblem::new(x1, x2, y, z.clone(), d1.adjoint() * &z, d2.adjoint() * &z).unwrap();

    let s = dsm_solve(StructureFamily::Hermitian, &p, &cfg).unwrap();
    let (r1, r2) = p.residuals(&s.delta());
    println!(
        "hermitian Δ1:  norm in [{:.6}, {:.6}]  exact={}  residuals {:.1e} {:.1e}",
        s.norm_lower, s.norm_upper, s.exact, r1, r2
    );
    let free = map_two_sided(&p.x(), &p.y, &p.z, &p.w(), &cfg).unwrap();
    println!("no structure:  {:.6}", free.min_norm);
    println!("generating matrix norm: {:.6}", (d1.norm_squared() + d2.norm_squared()).sqrt());
}
