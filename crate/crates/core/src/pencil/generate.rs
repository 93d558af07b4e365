//! Seeded random pencils and admissible approximate eigenpairs.
//!
//! All draws use `ChaCha8Rng::seed_from_u64(seed)`, with real and imaginary
//! parts uniform on `[-1, 1]`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BlockSelection, EigenPair, PHPencil};
use crate::linalg::{c, hermitian_eigen, CMat, CVec, ToleranceConfig};
use crate::{Error, Result};

const RETRIES: usize = 64;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PencilOptions {
    /// Rank of the factor `G` in `R = GG*`. `None` means `n`; `Some(0)` gives `R = 0`.
    pub r_rank: Option<usize>,
}

fn rmat(rng: &mut ChaCha8Rng, n: usize, m: usize) -> CMat {
    CMat::from_fn(n, m, |_, _| c(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
}

fn rvec(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| c(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
}

/// `gen_pencil_with` at default options.
pub fn gen_pencil(n: usize, m: usize, seed: u64) -> PHPencil {
    gen_pencil_with(n, m, seed, &PencilOptions::default())
}

/// `J = A − A*`, `E = C + C*`, `R = GG*`, `S = FF* + I`, `B` dense.
///
/// # Panics
/// If `n` or `m` is zero.
pub fn gen_pencil_with(n: usize, m: usize, seed: u64, opts: &PencilOptions) -> PHPencil {
    assert!(n >= 1 && m >= 1, "pencil dimensions must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rmat(&mut rng, n, n);
    let cm = rmat(&mut rng, n, n);
    let g = rmat(&mut rng, n, opts.r_rank.unwrap_or(n).min(n));
    let f = rmat(&mut rng, m, m);
    let b = rmat(&mut rng, n, m);
    let j = &a - a.adjoint();
    let e = &cm + cm.adjoint();
    let r = crate::linalg::herm_part(&(&g * g.adjoint()));
    let s = crate::linalg::herm_part(&(&f * f.adjoint())) + CMat::identity(m, m);
    let p = PHPencil { n, m, j, r, e, b, s };
    debug_assert!(p.check(&ToleranceConfig::default()).iter().all(|c| c.pass));
    p
}

/// Orthonormal basis of `ker A` for Hermitian positive semidefinite `A`.
fn kernel_basis(a: &CMat, cfg: &ToleranceConfig) -> CMat {
    let (vals, vecs) = hermitian_eigen(a);
    let top = vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].abs() <= cfg.rank_tol * top.max(1.0)).collect();
    CMat::from_fn(a.nrows(), keep.len(), |i, k| vecs[(i, keep[k])])
}

/// Draws an approximate eigenpair `(λ, u)` with `u3 = 0`, `u2 = αu1`, and
/// the side conditions that make the backward error of `blocks` finite.
///
/// `RB` additionally needs `(J + λE)u1 = 0`; `λ = iτ` is then located where
/// the Hermitian pencil `−iJ + τE` turns singular.
pub fn gen_eigpair(p: &PHPencil, seed: u64, blocks: BlockSelection) -> Result<EigenPair> {
    let cfg = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let basis = if blocks.r && !blocks.j && !blocks.e {
        None
    } else if !blocks.r && blocks.b {
        let k = kernel_basis(&p.r, &cfg);
        if k.ncols() == 0 {
            return Err(Error::Generation(format!("{blocks} needs Ru1 = 0 but R is nonsingular")));
        }
        Some(k)
    } else if blocks.r && !blocks.b {
        let k = kernel_basis(&(&p.b * p.b.adjoint()), &cfg);
        if k.ncols() == 0 {
            return Err(Error::Generation(format!("{blocks} needs B*u1 = 0 but B has full row rank")));
        }
        Some(k)
    } else {
        Some(CMat::identity(p.n, p.n))
    };

    for _ in 0..RETRIES {
        let alpha = {
            let modulus = rng.gen_range(0.5..=2.0);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(modulus, phase)
        };
        let (lambda, u1) = match &basis {
            Some(k) => {
                let t = rng.gen_range(0.1..=3.0);
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                (c(0.0, sign * t), k * rvec(&mut rng, k.ncols()))
            }
            None => match singular_point(p, &mut rng) {
                Some(found) => found,
                None => return Err(Error::Generation("−iJ + τE is never singular for finite τ ≠ 0".into())),
            },
        };
        if u1.norm() < 1e-3 {
            continue;
        }
        let u2 = &u1 * alpha;
        if blocks.r && (&p.r * &u2).norm() <= 1e-8 * p.r.norm().max(1.0) * u2.norm() {
            continue;
        }
        return EigenPair::new(lambda, u1, u2, CVec::zeros(p.m), &cfg);
    }
    Err(Error::Generation(format!("no admissible eigenpair for {blocks} after {RETRIES} draws")))
}

fn positive_count(p: &PHPencil, theta: f64) -> usize {
    let h = herm_pencil(p, theta);
    crate::linalg::hermitian_eigenvalues(&h).iter().filter(|&&v| v > 0.0).count()
}

/// `cos θ (−iJ) + sin θ E`.
fn herm_pencil(p: &PHPencil, theta: f64) -> CMat {
    let h = &p.j * c(0.0, -theta.cos()) + &p.e * c(theta.sin(), 0.0);
    crate::linalg::herm_part(&h)
}

/// Picks a random sign change of the inertia of `cos θ(−iJ) + sin θ E` on a
/// grid over `θ ∈ (−π/2, π/2)` away from `θ = 0`, bisects it, and returns
/// `λ = i tan θ` with the eigenvector of the eigenvalue closest to zero.
fn singular_point(p: &PHPencil, rng: &mut ChaCha8Rng) -> Option<(Complex64, CVec)> {
    const GRID: usize = 720;
    let half = std::f64::consts::FRAC_PI_2;
    let lo = -half + 1e-3;
    let step = (2.0 * half - 2e-3) / GRID as f64;
    let thetas: Vec<f64> = (0..=GRID).map(|k| lo + k as f64 * step).collect();
    let counts: Vec<usize> = thetas.iter().map(|&t| positive_count(p, t)).collect();
    let brackets: Vec<(f64, f64)> = (0..GRID)
        .filter(|&k| counts[k] != counts[k + 1])
        .map(|k| (thetas[k], thetas[k + 1]))
        .filter(|(a, b)| a.abs().min(b.abs()) > 1e-2 || a.signum() == b.signum())
        .collect();
    if brackets.is_empty() {
        return None;
    }
    let (mut a, mut b) = brackets[rng.gen_range(0..brackets.len())];
    let ca = positive_count(p, a);
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if positive_count(p, mid) == ca {
            a = mid;
        } else {
            b = mid;
        }
    }
    let theta = 0.5 * (a + b);
    let (vals, vecs) = hermitian_eigen(&herm_pencil(p, theta));
    let k = (0..vals.len()).min_by(|&i, &j| vals[i].abs().total_cmp(&vals[j].abs()))?;
    let v = vecs.column(k).into_owned();
    Some((c(0.0, theta.tan()), v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::eta_sd;

    #[test]
    fn deterministic_and_valid() {
        let cfg = ToleranceConfig::default();
        assert_eq!(gen_pencil(4, 2, 9), gen_pencil(4, 2, 9));
        assert_ne!(gen_pencil(4, 2, 9).j, gen_pencil(4, 2, 10).j);
        for seed in 0..100 {
            let p = gen_pencil(4, 2, seed);
            assert!(p.check(&cfg).iter().all(|c| c.pass), "seed {seed}");
        }
        let p = gen_pencil(1, 1, 0);
        assert!(p.check(&cfg).iter().all(|c| c.pass));
    }

    #[test]
    fn rank_option_controls_kernel_of_r() {
        let cfg = ToleranceConfig::default();
        let p = gen_pencil_with(4, 1, 3, &PencilOptions { r_rank: Some(2) });
        assert_eq!(crate::linalg::rank(&p.r, &cfg), 2);
        let p = gen_pencil_with(4, 1, 3, &PencilOptions { r_rank: Some(0) });
        assert_eq!(p.r.norm(), 0.0);
    }

    #[test]
    fn jreb_draws_are_finite() {
        let cfg = ToleranceConfig::default();
        for seed in 0..100 {
            let p = gen_pencil(3, 2, seed);
            let ep = gen_eigpair(&p, seed, BlockSelection::JREB).unwrap();
            assert_eq!(ep.u3.norm(), 0.0);
            assert!(ep.lambda.re == 0.0 && ep.lambda.im.abs() >= 0.1);
            assert!(eta_sd(&p, &ep, BlockSelection::JREB, &cfg).unwrap().finite);
        }
    }

    #[test]
    fn kernel_constraints_enforced_or_reported() {
        let p = gen_pencil(3, 2, 4);
        let ep = gen_eigpair(&p, 4, BlockSelection::JR).unwrap();
        assert!((p.b.adjoint() * &ep.u1).norm() < 1e-10);
        // B square and invertible: B*u1 = 0 forces u1 = 0
        let p = gen_pencil(2, 2, 4);
        assert!(matches!(gen_eigpair(&p, 4, BlockSelection::JR), Err(Error::Generation(_))));
        let p = gen_pencil(2, 1, 4);
        assert!(matches!(gen_eigpair(&p, 4, BlockSelection::JB), Err(Error::Generation(_))));
    }

    #[test]
    fn rb_pairs_lie_on_singular_points() {
        for seed in 0..20 {
            let p = gen_pencil(3, 1, seed);
            let ep = gen_eigpair(&p, seed, BlockSelection::RB).unwrap();
            let jle = &p.j + &p.e * ep.lambda;
            assert!((&jle * &ep.u1).norm() < 1e-10 * jle.norm(), "seed {seed}");
            assert!((&p.r * &ep.u1).norm() > 1e-6);
        }
    }
}
