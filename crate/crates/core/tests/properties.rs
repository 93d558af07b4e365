use dsmkit::dsm::{dsm_solve, DsmProblem};
use dsmkit::io::{format_imaginary, parse_imaginary, MatrixFile};
use dsmkit::linalg::{c, col, dot, outer, pinv, vdag};
use dsmkit::maps::{map_characterize, map_min, structure_deviation, MapParams, StructureFamily};
use dsmkit::pencil::{
    eta_s, eta_sd, gen_eigpair, gen_pencil_with, reconstruct_perturbation, BlockSelection, EigenPair,
    PHPencil, PencilOptions,
};
use dsmkit::{CMat, CVec, Complex64, ToleranceConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use StructureFamily::*;

fn rvec(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn rmat(rng: &mut ChaCha8Rng, r: usize, k: usize) -> CMat {
    CMat::from_fn(r, k, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn member(rng: &mut ChaCha8Rng, family: StructureFamily, n: usize) -> CMat {
    let a = rmat(rng, n, n);
    let g = rmat(rng, n, n);
    let gg = &g * g.adjoint();
    match family {
        Unstructured => a,
        Hermitian => &a + a.adjoint(),
        SkewHermitian => &a - a.adjoint(),
        Symmetric => &a + a.transpose(),
        SkewSymmetric => &a - a.transpose(),
        Psd => gg,
        Nsd => -gg,
        Dissipative => gg + &a - a.adjoint(),
        AntiDissipative => -gg + &a - a.adjoint(),
    }
}

/// A free parameter satisfying the constraints of `family`'s characterization.
fn admissible(rng: &mut ChaCha8Rng, family: StructureFamily, x: &CVec, y: &CVec) -> MapParams {
    let n = x.len();
    let a = rmat(rng, n, n);
    let g = rmat(rng, n, n);
    match family {
        Unstructured => MapParams::Matrix(a),
        Hermitian => MapParams::Matrix(&a + a.adjoint()),
        SkewHermitian => MapParams::Matrix(&a - a.adjoint()),
        Symmetric => MapParams::Matrix(&a + a.transpose()),
        SkewSymmetric => MapParams::Matrix(&a - a.transpose()),
        Psd | Nsd => MapParams::Psd(&g * g.adjoint()),
        Dissipative | AntiDissipative => {
            let y = if family == Dissipative { y.clone() } else { -y };
            let v = &y * c(2.0, 0.0) + a.adjoint() * x;
            let k = outer(&v, &v).map(|e| e / (4.0 * dot(x, &y).re)) + &g * g.adjoint();
            MapParams::Dissipative { z: a, k, g: CMat::zeros(n, n) }
        }
    }
}

/// A 4×2 pencil whose `R` has a kernel when `blocks` needs `Ru1 = 0`, with
/// an admissible eigenpair; `None` when no admissible pair exists.
fn admissible_pair(seed: u64, blocks: BlockSelection) -> Option<(PHPencil, EigenPair)> {
    let r_rank = (blocks.b && !blocks.r).then_some(2);
    let p = gen_pencil_with(4, 2, seed, &PencilOptions { r_rank });
    let ep = gen_eigpair(&p, seed.rotate_left(17), blocks).ok()?;
    Some((p, ep))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn family() -> impl Strategy<Value = StructureFamily> {
    prop::sample::select(StructureFamily::ALL.to_vec())
}

fn unit_scale() -> impl Strategy<Value = Complex64> {
    (0.1f64..10.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn penrose_identities(seed: u64, r in 1usize..9, k in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rmat(&mut rng, r, k);
        let ap = pinv(&a, &ToleranceConfig::default());
        let s = a.norm();
        prop_assert!((&a * &ap * &a - &a).norm() <= 1e-10 * s);
        prop_assert!((&ap * &a * &ap - &ap).norm() <= 1e-10 * ap.norm());
        let aap = &a * &ap;
        let apa = &ap * &a;
        prop_assert!((aap.adjoint() - &aap).norm() <= 1e-10);
        prop_assert!((apa.adjoint() - &apa).norm() <= 1e-10);
    }

    #[test]
    fn map_solutions_are_scale_invariant(seed: u64, n in 1usize..6, f in family(), s in unit_scale()) {
        let cfg = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = rvec(&mut rng, n);
        let y = member(&mut rng, f, n) * &x;
        prop_assume!(y.norm() > 1e-3);
        let base = map_min(f, &x, &y, &cfg).unwrap();
        let scaled = map_min(f, &(&x * s), &(&y * s), &cfg).unwrap();
        prop_assert!(rel(scaled.min_norm, base.min_norm) <= 1e-12, "{} vs {}", scaled.min_norm, base.min_norm);
        prop_assert!((&scaled.minimizer - &base.minimizer).norm() <= 1e-12 * base.min_norm.max(1.0));
    }

    #[test]
    fn minimizer_interpolates_and_is_never_beaten(seed: u64, n in 1usize..7, f in family()) {
        let cfg = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = rvec(&mut rng, n);
        let y = member(&mut rng, f, n) * &x;
        prop_assume!(y.norm() > 1e-3);
        let sol = map_min(f, &x, &y, &cfg).unwrap();
        prop_assert!((&sol.minimizer * &x - &y).norm() <= 1e-10 * (sol.min_norm * x.norm() + y.norm()));
        let (dev, lmin) = structure_deviation(f, &sol.minimizer);
        prop_assert!(dev <= 1e-10);
        prop_assert!(lmin.is_none_or(|l| l >= -1e-10 * sol.min_norm.max(1.0)));
        for _ in 0..4 {
            let params = admissible(&mut rng, f, &x, &y);
            let other = map_characterize(f, &x, &y, &params, &cfg).unwrap();
            prop_assert!(other.norm() >= sol.min_norm - 1e-9, "{f}: {} < {}", other.norm(), sol.min_norm);
        }
    }

    #[test]
    fn dissipative_norm_identity(seed: u64, n in 1usize..7) {
        let cfg = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = rvec(&mut rng, n);
        let y = member(&mut rng, Dissipative, n) * &x;
        let sol = map_min(Dissipative, &x, &y, &cfg).unwrap();
        let classical = sol.classical.expect("dissipative reports the classical candidate");
        let xn = x.norm_squared();
        let formula = 2.0 * y.norm_squared() / xn - dot(&x, &y).norm_sqr() / (xn * xn);
        prop_assert!(rel(classical.norm_squared(), formula) <= 1e-10);
        prop_assert!(sol.min_norm * sol.min_norm <= formula * (1.0 + 1e-12));
    }

    #[test]
    fn doubly_structured_solutions_interpolate(seed: u64, n in 1usize..7, m in 1usize..4, f in family()) {
        // 1×1 skew-symmetric matrices vanish, so w1 would be zero.
        prop_assume!(f != Unstructured && !(f == SkewSymmetric && n == 1));
        let cfg = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d1 = member(&mut rng, f, n);
        let d2 = rmat(&mut rng, n, m);
        let x1 = rvec(&mut rng, n);
        let x2 = rvec(&mut rng, m);
        let z = rvec(&mut rng, n);
        let y = &d1 * &x1 + &d2 * &x2;
        let p = DsmProblem::new(x1, x2, y, z.clone(), d1.adjoint() * &z, d2.adjoint() * &z);
        prop_assume!(p.is_ok());
        let p = p.unwrap();
        let sol = dsm_solve(f, &p, &cfg).unwrap();
        let (r1, r2) = p.residuals(&sol.delta());
        prop_assert!(r1 <= 1e-10 && r2 <= 1e-10, "{f}: residuals {r1:.2e} {r2:.2e}");
        let (dev, lmin) = structure_deviation(f, &sol.h1);
        prop_assert!(dev <= 1e-10);
        prop_assert!(lmin.is_none_or(|l| l >= -1e-9 * sol.h1.norm().max(1.0)));
        prop_assert!(sol.norm_lower <= sol.norm_upper * (1.0 + 1e-12));
        let generator = d1.norm_squared() + d2.norm_squared();
        if sol.exact {
            prop_assert!(sol.norm_upper <= generator.sqrt() * (1.0 + 1e-10));
        }
    }

    #[test]
    fn backward_errors_are_degree_zero_in_u(seed: u64, k in 0usize..11, s in unit_scale()) {
        let blocks = BlockSelection::ALL[k];
        prop_assume!(blocks != BlockSelection::JE);
        let cfg = ToleranceConfig::default();
        let pair = admissible_pair(seed, blocks);
        prop_assume!(pair.is_some());
        let (p, ep) = pair.unwrap();
        let scaled = EigenPair::new(ep.lambda, &ep.u1 * s, &ep.u2 * s, &ep.u3 * s, &cfg).unwrap();
        let a = eta_sd(&p, &ep, blocks, &cfg).unwrap();
        let b = eta_sd(&p, &scaled, blocks, &cfg).unwrap();
        prop_assert!(a.finite && b.finite);
        prop_assert!(rel(b.eta_lower, a.eta_lower) <= 1e-10);
        prop_assert!(rel(b.eta_upper, a.eta_upper) <= 1e-10);
    }

    #[test]
    fn bounds_sandwich_and_reconstruct(seed: u64, k in 0usize..11) {
        let blocks = BlockSelection::ALL[k];
        prop_assume!(blocks != BlockSelection::JE);
        let cfg = ToleranceConfig::default();
        let pair = admissible_pair(seed, blocks);
        prop_assume!(pair.is_some());
        let (p, ep) = pair.unwrap();
        let b = eta_sd(&p, &ep, blocks, &cfg).unwrap();
        prop_assert!(b.eta_lower <= b.eta_upper * (1.0 + 1e-12));
        let d = reconstruct_perturbation(&p, &ep, blocks, &b, &cfg).unwrap();
        prop_assert!(d.residual <= 1e-10 * d.scale);
        prop_assert!(rel(d.block_norm, b.attained) <= 1e-10);
    }

    #[test]
    fn semidefinite_variant_delegates_without_r(seed: u64, k in 0usize..3) {
        let blocks = [BlockSelection::JB, BlockSelection::EB, BlockSelection::JEB][k];
        let cfg = ToleranceConfig::default();
        let pair = admissible_pair(seed, blocks);
        prop_assume!(pair.is_some());
        let (p, ep) = pair.unwrap();
        let sd = eta_sd(&p, &ep, blocks, &cfg).unwrap();
        let s = eta_s(&p, &ep, blocks, &cfg).unwrap();
        prop_assert_eq!(sd.eta_lower.to_bits(), s.eta_lower.to_bits());
        prop_assert_eq!(sd.eta_upper.to_bits(), s.eta_upper.to_bits());
        prop_assert_eq!(sd.finite, s.finite);
    }

    #[test]
    fn matrix_json_round_trip(re in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..13), cols in 1usize..4) {
        let rows = re.len().div_ceil(cols);
        let a = CMat::from_fn(rows, cols, |i, j| {
            let v = re.get(i * cols + j).copied().unwrap_or(0.0);
            c(v, -v / 3.0)
        });
        let text = serde_json::to_string(&MatrixFile::from_cmat(&a)).unwrap();
        let back: MatrixFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_cmat("a").unwrap(), a);
    }

    #[test]
    fn imaginary_syntax_round_trips_exactly(im in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let z = parse_imaginary(&format_imaginary(im)).unwrap();
        prop_assert_eq!(z.im.to_bits(), im.to_bits());
        prop_assert_eq!(z.re, 0.0);
    }
}

#[test]
fn unstructured_minimizer_is_the_rank_one_map() {
    let x = CVec::from_column_slice(&[c(1.0, 0.0), c(0.0, 2.0)]);
    let y = CVec::from_column_slice(&[c(3.0, 0.0), c(1.0, 1.0)]);
    let sol = map_min(Unstructured, &x, &y, &ToleranceConfig::default()).unwrap();
    let expect = col(&y) * vdag(&x);
    assert!((sol.minimizer - expect).norm() < 1e-14);
}
