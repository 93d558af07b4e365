//! Port-Hamiltonian pencils `L(z) = M + zN` and structure-preserving
//! eigenpair backward errors.
//!
//! For `λ ∈ iℝ` and `u = [u1; u2; u3]`, a block perturbation
//! `(ΔJ, ΔR, ΔE, ΔB)` makes `(λ, u)` an eigenpair of `L − ΔL` exactly when
//! `Δ = [ΔJ − ΔR + λΔE, ΔB]` satisfies `Δx = y`, `Δ*z = w` for the data
//! returned by [`mapping_data`]. The structure imposed on the blocks decides
//! which doubly structured mapping applies; see [`eta_sd`] and [`eta_s`].

mod backward;
mod experiment;
mod generate;

pub use backward::{
    eta_s, eta_sd, reconstruct_perturbation, BackwardErrorBounds, BlockSelection, Condition, PerturbationBlocks,
    Variant,
};
pub use experiment::{experiment_table, ExperimentRow, SWEEP_LAMBDAS};
pub use generate::{gen_eigpair, gen_pencil, gen_pencil_with, PencilOptions};

use num_complex::Complex64;
use serde::Serialize;

use crate::dsm::stack;
use crate::linalg::{c, hermitian_deviation, min_eigenvalue, CMat, CVec, ToleranceConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PHPencil {
    pub n: usize,
    pub m: usize,
    pub j: CMat,
    pub r: CMat,
    pub e: CMat,
    pub b: CMat,
    pub s: CMat,
}

/// One line of [`PHPencil::check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub block: &'static str,
    pub property: &'static str,
    pub pass: bool,
    pub value: f64,
}

impl PHPencil {
    /// Builds a pencil and rejects it unless every invariant holds.
    pub fn new(j: CMat, r: CMat, e: CMat, b: CMat, s: CMat, cfg: &ToleranceConfig) -> Result<Self> {
        let n = j.nrows();
        let m = s.nrows();
        for (mat, name, rows, cols) in [(&j, "J", n, n), (&r, "R", n, n), (&e, "E", n, n), (&b, "B", n, m), (&s, "S", m, m)] {
            if mat.shape() != (rows, cols) {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {rows}x{cols}",
                    mat.nrows(),
                    mat.ncols()
                )));
            }
        }
        if n == 0 || m == 0 {
            return Err(Error::DimensionMismatch("n and m must be positive".into()));
        }
        let p = Self { n, m, j, r, e, b, s };
        if let Some(bad) = p.check(cfg).into_iter().find(|c| !c.pass) {
            return Err(Error::Structural(format!("{}: {} fails ({:.3e})", bad.block, bad.property, bad.value)));
        }
        Ok(p)
    }

    /// Per-block invariant report.
    pub fn check(&self, cfg: &ToleranceConfig) -> Vec<InvariantCheck> {
        let skew_dev = (&self.j + self.j.adjoint()).norm() / self.j.norm().max(1.0);
        let r_min = min_eigenvalue(&self.r);
        let s_min = min_eigenvalue(&self.s);
        vec![
            InvariantCheck {
                block: "J",
                property: "skew-Hermitian",
                pass: skew_dev <= cfg.residual_tol,
                value: skew_dev,
            },
            InvariantCheck {
                block: "R",
                property: "Hermitian",
                pass: hermitian_deviation(&self.r) <= cfg.residual_tol,
                value: hermitian_deviation(&self.r),
            },
            InvariantCheck {
                block: "R",
                property: "positive semidefinite",
                pass: r_min >= -cfg.psd_tol * self.r.norm().max(1.0),
                value: r_min,
            },
            InvariantCheck {
                block: "E",
                property: "Hermitian",
                pass: hermitian_deviation(&self.e) <= cfg.residual_tol,
                value: hermitian_deviation(&self.e),
            },
            InvariantCheck {
                block: "S",
                property: "Hermitian",
                pass: hermitian_deviation(&self.s) <= cfg.residual_tol,
                value: hermitian_deviation(&self.s),
            },
            InvariantCheck {
                block: "S",
                property: "positive definite",
                pass: s_min > cfg.psd_tol * self.s.norm().max(1.0),
                value: s_min,
            },
        ]
    }

    pub fn size(&self) -> usize {
        2 * self.n + self.m
    }

    /// `M = [0, J−R, B; (J−R)*, 0, 0; B*, 0, S]`.
    pub fn m_matrix(&self) -> CMat {
        let (n, m) = (self.n, self.m);
        let mut out = CMat::zeros(2 * n + m, 2 * n + m);
        let jr = &self.j - &self.r;
        out.view_mut((0, n), (n, n)).copy_from(&jr);
        out.view_mut((0, 2 * n), (n, m)).copy_from(&self.b);
        out.view_mut((n, 0), (n, n)).copy_from(&jr.adjoint());
        out.view_mut((2 * n, 0), (m, n)).copy_from(&self.b.adjoint());
        out.view_mut((2 * n, 2 * n), (m, m)).copy_from(&self.s);
        out
    }

    /// `N = [0, E, 0; −E*, 0, 0; 0, 0, 0]`.
    pub fn n_matrix(&self) -> CMat {
        let n = self.n;
        let mut out = CMat::zeros(2 * n + self.m, 2 * n + self.m);
        out.view_mut((0, n), (n, n)).copy_from(&self.e);
        out.view_mut((n, 0), (n, n)).copy_from(&-self.e.adjoint());
        out
    }

    /// `L(λ) = M + λN`.
    pub fn eval(&self, lambda: Complex64) -> CMat {
        self.m_matrix() + self.n_matrix() * lambda
    }
}

/// A candidate eigenpair with `λ` on the imaginary axis.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: Complex64,
    pub u1: CVec,
    pub u2: CVec,
    pub u3: CVec,
}

impl EigenPair {
    /// Checks `|Re λ| ≤ tol·|λ|` and projects `λ` onto `iℝ`.
    pub fn new(lambda: Complex64, u1: CVec, u2: CVec, u3: CVec, cfg: &ToleranceConfig) -> Result<Self> {
        if u1.len() != u2.len() {
            return Err(Error::DimensionMismatch(format!("u1 has {} entries, u2 has {}", u1.len(), u2.len())));
        }
        if lambda.re.abs() > cfg.residual_tol * lambda.norm() {
            return Err(Error::Structural(format!("λ = {lambda} is not purely imaginary")));
        }
        if u1.norm() == 0.0 && u2.norm() == 0.0 && u3.norm() == 0.0 {
            return Err(Error::DegenerateInput("u must be nonzero".into()));
        }
        Ok(Self {
            lambda: c(0.0, lambda.im),
            u1,
            u2,
            u3,
        })
    }

    /// Splits a stacked `u ∈ C^{2n+m}`.
    pub fn from_stacked(lambda: Complex64, u: &CVec, n: usize, cfg: &ToleranceConfig) -> Result<Self> {
        if u.len() < 2 * n {
            return Err(Error::DimensionMismatch(format!("u has {} entries, need at least {}", u.len(), 2 * n)));
        }
        let m = u.len() - 2 * n;
        Self::new(
            lambda,
            u.rows(0, n).into_owned(),
            u.rows(n, n).into_owned(),
            u.rows(2 * n, m).into_owned(),
            cfg,
        )
    }

    pub fn u(&self) -> CVec {
        stack(&stack(&self.u1, &self.u2), &self.u3)
    }

    pub fn with_lambda(&self, lambda: Complex64) -> Self {
        Self {
            lambda: c(0.0, lambda.im),
            ..self.clone()
        }
    }

    fn check_dims(&self, p: &PHPencil) -> Result<()> {
        if self.u1.len() != p.n || self.u2.len() != p.n || self.u3.len() != p.m {
            return Err(Error::DimensionMismatch(format!(
                "eigenvector blocks ({}, {}, {}) do not match n = {}, m = {}",
                self.u1.len(),
                self.u2.len(),
                self.u3.len(),
                p.n,
                p.m
            )));
        }
        Ok(())
    }
}

/// `x = [u2; u3]`, `y = (J−R+λE)u2 + Bu3`, `z = u1`,
/// `w = [−(J+R+λE)u1; B*u1 + Su3]`.
pub fn mapping_data(p: &PHPencil, ep: &EigenPair) -> Result<(CVec, CVec, CVec, CVec)> {
    ep.check_dims(p)?;
    let le = &p.e * ep.lambda;
    let y = (&p.j - &p.r + &le) * &ep.u2 + &p.b * &ep.u3;
    let w1 = -((&p.j + &p.r + &le) * &ep.u1);
    let w2 = p.b.adjoint() * &ep.u1 + &p.s * &ep.u3;
    Ok((stack(&ep.u2, &ep.u3), y, ep.u1.clone(), stack(&w1, &w2)))
}

/// `‖L(λ)u‖ / (‖L(λ)‖_F ‖u‖)`.
pub fn eigen_residual(p: &PHPencil, ep: &EigenPair) -> f64 {
    let l = p.eval(ep.lambda);
    let u = ep.u();
    (&l * &u).norm() / (l.norm() * u.norm()).max(f64::MIN_POSITIVE)
}

/// A pencil with `n = m = 1` and real `R`, `E`, `S`.
pub fn scalar_pencil(j: Complex64, r: f64, e: f64, b: Complex64, s: f64) -> PHPencil {
    let one = |z: Complex64| CMat::from_element(1, 1, z);
    PHPencil {
        n: 1,
        m: 1,
        j: one(j),
        r: one(c(r, 0.0)),
        e: one(c(e, 0.0)),
        b: one(b),
        s: one(c(s, 0.0)),
    }
}
