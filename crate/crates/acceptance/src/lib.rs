//! Seeded random instances shared by the acceptance suite.

use dsmkit::dsm::DsmProblem;
use dsmkit::linalg::{c, conj_vec, dot, null_projector_vec};
use dsmkit::maps::StructureFamily;
use dsmkit::{CMat, CVec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rvec(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn rmat(rng: &mut ChaCha8Rng, r: usize, k: usize) -> CMat {
    CMat::from_fn(r, k, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// A random member of `family` (semidefinite parts have random rank).
pub fn rmember(rng: &mut ChaCha8Rng, family: StructureFamily, n: usize) -> CMat {
    let a = rmat(rng, n, n);
    let k = rng.gen_range(1..=n);
    let g = rmat(rng, n, k);
    let gg = &g * g.adjoint();
    match family {
        StructureFamily::Unstructured => a,
        StructureFamily::Hermitian => &a + a.adjoint(),
        StructureFamily::SkewHermitian => &a - a.adjoint(),
        StructureFamily::Symmetric => &a + a.transpose(),
        StructureFamily::SkewSymmetric => &a - a.transpose(),
        StructureFamily::Psd => gg,
        StructureFamily::Nsd => -gg,
        StructureFamily::Dissipative => gg + &a - a.adjoint(),
        StructureFamily::AntiDissipative => -gg + &a - a.adjoint(),
    }
}

/// `[A B]`.
pub fn hcat(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

pub fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Random feasible DSM data from a structured `[Δ1 Δ2]`.
pub fn dsm_instance(rng: &mut ChaCha8Rng, family: StructureFamily, n: usize, m: usize) -> DsmProblem {
    let d = hcat(&rmember(rng, family, n), &rmat(rng, n, m));
    let x = rvec(rng, n + m);
    let z = rvec(rng, n);
    DsmProblem::from_stacked(n, &x, &(&d * &x), &z, &(d.adjoint() * &z)).unwrap()
}

/// As [`dsm_instance`] with `x1` a multiple of `z` (of `z̄` for the
/// symmetric families).
pub fn colinear_dsm_instance(rng: &mut ChaCha8Rng, family: StructureFamily, n: usize, m: usize) -> DsmProblem {
    let d1 = rmember(rng, family, n);
    let d2 = rmat(rng, n, m);
    let z = rvec(rng, n);
    let alpha = c(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0));
    let x1 = if matches!(family, StructureFamily::Symmetric | StructureFamily::SkewSymmetric) {
        conj_vec(&z) * alpha
    } else {
        &z * alpha
    };
    let x2 = rvec(rng, m);
    let y = &d1 * &x1 + &d2 * &x2;
    DsmProblem::new(x1, x2, y, z.clone(), d1.adjoint() * &z, d2.adjoint() * &z).unwrap()
}

/// Dissipative Type-2 data with `y = βz` and `z ⟂ x1`.
pub fn classical_type2_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DsmProblem {
    let d1 = rmember(rng, StructureFamily::Dissipative, n);
    let z = rvec(rng, n);
    let raw = rvec(rng, n);
    let x1 = &raw - &z * (dot(&z, &raw) / z.norm_squared());
    let x2 = rvec(rng, m);
    let beta = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let y = &z * beta;
    let pinv_x2 = x2.adjoint() / c(x2.norm_squared(), 0.0);
    let d2 = (&y - &d1 * &x1) * pinv_x2 + rmat(rng, n, m) * null_projector_vec(&x2);
    DsmProblem::new(x1, x2, y, z.clone(), d1.adjoint() * &z, d2.adjoint() * &z).unwrap()
}
