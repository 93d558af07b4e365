//! Structures given by a unitary scalar product `⟨x, y⟩_M`.
//!
//! For `M* = σM` (sesquilinear) or `Mᵀ = σM` (bilinear) and the algebra sign
//! `ε` (+1 Jordan, −1 Lie), `Δ1★ = εΔ1` is equivalent to `MΔ1` being
//! Hermitian/symmetric when `σε = 1` and skew-Hermitian/skew-symmetric
//! otherwise. The problem is solved for `MΔ` with data `(x, My, Mz, w)` and
//! lifted back by `M*`; the Frobenius norm is unchanged.

use super::{dsm_solve, DsmProblem, DsmSolution};
use crate::linalg::{CMat, ToleranceConfig};
use crate::maps::StructureFamily;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Bilinear,
    Sesquilinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algebra {
    /// `A★ = A`.
    Jordan,
    /// `A★ = −A`.
    Lie,
}

#[derive(Debug, Clone)]
pub struct ScalarProduct {
    pub m: CMat,
    pub form: Form,
    pub algebra: Algebra,
    sigma: f64,
}

impl ScalarProduct {
    /// Validates that `M` is unitary and (skew-)symmetric or (skew-)Hermitian
    /// as the form requires.
    pub fn new(m: CMat, form: Form, algebra: Algebra, cfg: &ToleranceConfig) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("M must be square".into()));
        }
        let n = m.nrows();
        let tol = cfg.residual_tol * (n as f64).sqrt().max(1.0);
        if (m.adjoint() * &m - CMat::identity(n, n)).norm() > tol {
            return Err(Error::Structural("M is not unitary".into()));
        }
        let t = match form {
            Form::Sesquilinear => m.adjoint(),
            Form::Bilinear => m.transpose(),
        };
        let sigma = if (&t - &m).norm() <= tol {
            1.0
        } else if (&t + &m).norm() <= tol {
            -1.0
        } else {
            return Err(Error::Structural(format!(
                "M must be {} up to sign",
                if form == Form::Sesquilinear { "Hermitian" } else { "symmetric" }
            )));
        };
        Ok(Self { m, form, algebra, sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// The family that `MΔ1` belongs to.
    pub fn target_family(&self) -> StructureFamily {
        let eps = if self.algebra == Algebra::Jordan { 1.0 } else { -1.0 };
        match (self.form, self.sigma * eps > 0.0) {
            (Form::Sesquilinear, true) => StructureFamily::Hermitian,
            (Form::Sesquilinear, false) => StructureFamily::SkewHermitian,
            (Form::Bilinear, true) => StructureFamily::Symmetric,
            (Form::Bilinear, false) => StructureFamily::SkewSymmetric,
        }
    }

    /// `A★ = M⁻¹ A* M` (sesquilinear) or `M⁻¹ Aᵀ M` (bilinear).
    pub fn adjoint(&self, a: &CMat) -> CMat {
        let at = match self.form {
            Form::Sesquilinear => a.adjoint(),
            Form::Bilinear => a.transpose(),
        };
        self.m.adjoint() * at * &self.m
    }

    /// `‖A★ − εA‖_F / ‖A‖_F`.
    pub fn membership_residual(&self, a: &CMat) -> f64 {
        let eps = if self.algebra == Algebra::Jordan { 1.0 } else { -1.0 };
        (self.adjoint(a) - a.map(|v| v * eps)).norm() / a.norm().max(f64::MIN_POSITIVE)
    }
}

/// Solve the DSM problem with `Δ1` in the Jordan or Lie algebra of `sp`.
pub fn jordan_lie_reduce(sp: &ScalarProduct, p: &DsmProblem, cfg: &ToleranceConfig) -> Result<DsmSolution> {
    p.validate()?;
    if sp.m.nrows() != p.n() {
        return Err(Error::DimensionMismatch(format!("M is {0}x{0}, n = {1}", sp.m.nrows(), p.n())));
    }
    let reduced = DsmProblem {
        y: &sp.m * &p.y,
        z: &sp.m * &p.z,
        ..p.clone()
    };
    let mut sol = dsm_solve(sp.target_family(), &reduced, cfg)?;
    let ma = sp.m.adjoint();
    sol.h1 = &ma * &sol.h1;
    sol.h2 = &ma * &sol.h2;
    Ok(sol)
}
