//! Dissipative mappings (`Δ + Δ* ⪰ 0`).
//!
//! Type 1: `Δ ∈ C^{n,n}` dissipative with `ΔX = Y`, `Δ*Z = W`, for matrix
//! data sharing a range. Type 2: `Δ = [Δ1 Δ2]` with only `Δ1` dissipative.
//! Anti-dissipative variants reflect `(Y, W) → (−Y, −W)` and negate.

use super::{hstack, DsmProblem, DsmSolution, Sufficiency};
use crate::linalg::{
    col, colinear_factor, dot, min_eigenvalue, null_projector_vec, outer, pinv, svd_split, vdag,
    CMat, CVec, ToleranceConfig,
};
use crate::maps::{check_dissipative_params, dissipative_min, two_sided_raw, StructureFamily};
use crate::{Error, Result};

/// Data `X, Y, Z, W ∈ C^{n,m}` of a Type-1 problem.
#[derive(Debug, Clone)]
pub struct Type1Problem {
    pub x: CMat,
    pub y: CMat,
    pub z: CMat,
    pub w: CMat,
}

impl Type1Problem {
    pub fn new(x: CMat, y: CMat, z: CMat, w: CMat) -> Result<Self> {
        let s = x.shape();
        if y.shape() != s || z.shape() != s || w.shape() != s {
            return Err(Error::DimensionMismatch(format!(
                "X, Y, Z, W must share a shape; got {:?}, {:?}, {:?}, {:?}",
                s,
                y.shape(),
                z.shape(),
                w.shape()
            )));
        }
        Ok(Self { x, y, z, w })
    }

    pub fn from_vectors(x: &CVec, y: &CVec, z: &CVec, w: &CVec) -> Result<Self> {
        Self::new(col(x), col(y), col(z), col(w))
    }

    fn reflected(&self) -> Self {
        Self {
            y: -&self.y,
            w: -&self.w,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Type1Solution {
    pub minimizer: CMat,
    /// `‖𝓗‖_F`.
    pub min_norm: f64,
    /// The Gram block `J`; `(n−r)×(n−r)` in the matrix case, `n×n` in the vector case.
    pub gram: CMat,
    /// `‖YX†‖² + ‖WZ†‖² − tr(WZ†(WZ†)*XX†) + ‖J‖²`.
    pub norm_sq_formula: f64,
    /// Range and kernel preconditions held. When false the minimizer is still
    /// returned (the formulas stay evaluable) but minimality is not certified.
    pub hypotheses_hold: bool,
    pub warnings: Vec<String>,
    /// Vector case: `‖y‖²/‖x‖² − ‖w‖²/‖z‖² − |w*x|²/(‖x‖²‖z‖²) + ‖J‖²`, the
    /// scalar closed form stated for the vector case. It does not match
    /// `‖𝓗‖²` in general and is kept for comparison only.
    pub scalar_display_sq: Option<f64>,
}

fn rel(a: f64, scale: f64) -> f64 {
    a / scale.max(f64::MIN_POSITIVE)
}

/// Minimal-norm Type-1 dissipative mapping for matrix data.
pub fn dsdm_type1(q: &Type1Problem, cfg: &ToleranceConfig) -> Result<Type1Solution> {
    let (x, y, z, w) = (&q.x, &q.y, &q.z, &q.w);
    let n = x.nrows();
    let xp = pinv(x, cfg);
    let zp = pinv(z, cfg);
    let tol = cfg.residual_tol;

    if rel((y * &xp * x - y).norm(), y.norm()) > tol {
        return Err(Error::Infeasible("Y X† X ≠ Y".into()));
    }
    if rel((w * &zp * z - w).norm(), w.norm()) > tol {
        return Err(Error::Infeasible("W Z† Z ≠ W".into()));
    }
    let gap = (x.adjoint() * w - y.adjoint() * z).norm();
    if rel(gap, x.norm() * w.norm() + y.norm() * z.norm()) > tol {
        return Err(Error::Infeasible(format!("X*W ≠ Y*Z (gap {gap:.3e})")));
    }
    let xy = x.adjoint() * y;
    let sym = &xy + xy.adjoint();
    let lmin = min_eigenvalue(&sym);
    if lmin < -cfg.psd_tol * sym.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::Infeasible(format!("X*Y + Y*X ⪰ 0 fails (λmin = {lmin:.3e})")));
    }

    let mut warnings = Vec::new();
    let px = x * &xp;
    let pzr = z * &zp;
    let r = svd_split(x, cfg).rank;
    if svd_split(z, cfg).rank != r || (&px - &pzr).norm() > cfg.colinearity_tol.sqrt() * (r as f64).sqrt().max(1.0) {
        warnings.push("range(X) ≠ range(Z)".to_string());
    }

    let split = svd_split(x, cfg);
    let (u1, u2) = (&split.u1, &split.u2);
    let yx = y * &xp;
    let wz = w * &zp;
    let bmat = u1.adjoint() * (&yx + yx.adjoint()) * u1;
    let cmat = u2.adjoint() * (&yx + &wz) * u1;
    let bp = pinv(&bmat, cfg);
    let kernel_leak = (&cmat * (CMat::identity(r, r) - &bp * &bmat)).norm();
    if kernel_leak > cfg.rank_tol.sqrt() * (bmat.norm() + cmat.norm()).max(f64::MIN_POSITIVE) {
        warnings.push(format!("ker B ⊄ ker C (leak {kernel_leak:.3e})"));
    }
    let j = (&cmat * &bp * cmat.adjoint()).map(|v| v * 0.5);
    let wza = wz.adjoint();
    let h = &yx + &wza - &wza * &px + u2 * &j * u2.adjoint();

    let nsq = yx.norm_squared() + wz.norm_squared() - (&wz * &wza * &px).trace().re + j.norm_squared();
    let hyp = warnings.is_empty();
    if hyp {
        let lh = min_eigenvalue(&(&h + h.adjoint()));
        if lh < -cfg.psd_tol * h.norm().max(f64::MIN_POSITIVE) {
            return Err(Error::Verification(format!("minimizer not dissipative (λmin(𝓗+𝓗*) = {lh:.3e})")));
        }
    }
    debug_assert_eq!(h.nrows(), n);
    Ok(Type1Solution {
        min_norm: h.norm(),
        minimizer: h,
        gram: j,
        norm_sq_formula: nsq,
        hypotheses_hold: hyp,
        warnings,
        scalar_display_sq: None,
    })
}

/// Anti-dissipative (`Δ + Δ* ⪯ 0`) Type-1 mapping.
pub fn dsdm_type1_anti(q: &Type1Problem, cfg: &ToleranceConfig) -> Result<Type1Solution> {
    let mut s = dsdm_type1(&q.reflected(), cfg)?;
    s.minimizer = -s.minimizer;
    s.gram = -s.gram;
    Ok(s)
}

/// Type-1 mapping for vectors with `z = αx`.
pub fn dsdm_type1_vec(x: &CVec, y: &CVec, z: &CVec, w: &CVec, cfg: &ToleranceConfig) -> Result<Type1Solution> {
    let n = x.len();
    if y.len() != n || z.len() != n || w.len() != n {
        return Err(Error::DimensionMismatch("x, y, z, w must have equal length".into()));
    }
    if x.norm() == 0.0 || y.norm() == 0.0 || w.norm() == 0.0 || z.norm() == 0.0 {
        return Err(Error::DegenerateInput("x, y, z, w must be nonzero".into()));
    }
    let alpha = colinear_factor(z, x, cfg.colinearity_tol)
        .ok_or_else(|| Error::NotColinear("z is not a multiple of x".into()))?;
    let gap = dot(x, w) - dot(y, z);
    if gap.norm() > cfg.residual_tol * (x.norm() * w.norm() + y.norm() * z.norm()) {
        return Err(Error::Infeasible(format!("x*w ≠ y*z (gap {:.3e})", gap.norm())));
    }
    let re = dot(x, y).re;
    if re.abs() <= cfg.residual_tol * x.norm() * y.norm() {
        return Err(Error::HypothesisViolated("Re(x*y) = 0".into()));
    }
    if re < 0.0 {
        return Err(Error::Infeasible(format!("Re(x*y) < 0 ({re:.3e})")));
    }
    let v = y + w / alpha;
    let j = outer(&v, &v).map(|e| e / (4.0 * re));
    let px = null_projector_vec(x);
    let xd = vdag(x);
    let wzd = col(w) * vdag(z);
    let h = col(y) * &xd + wzd.adjoint() * &px + &px * &j * &px;
    let nx2 = x.norm_squared();
    let nz2 = z.norm_squared();
    let display = y.norm_squared() / nx2 - w.norm_squared() / nz2 - dot(w, x).norm_sqr() / (nx2 * nz2) + j.norm_squared();
    let nsq = (col(y) * &xd).norm_squared() + wzd.norm_squared() - (&wzd * wzd.adjoint() * col(x) * &xd).trace().re
        + (&px * &j * &px).norm_squared();
    Ok(Type1Solution {
        min_norm: h.norm(),
        minimizer: h,
        gram: j,
        norm_sq_formula: nsq,
        hypotheses_hold: true,
        warnings: Vec::new(),
        scalar_display_sq: Some(display),
    })
}

pub fn dsdm_type1_vec_anti(x: &CVec, y: &CVec, z: &CVec, w: &CVec, cfg: &ToleranceConfig) -> Result<Type1Solution> {
    let mut s = dsdm_type1_vec(x, &-y, z, &-w, cfg)?;
    s.minimizer = -s.minimizer;
    s.gram = -s.gram;
    Ok(s)
}

/// `Ĥ1 = (w1z†)* − 𝒫_z w1 z†`, the minimal dissipative map with `Ĥ1* z = w1`.
fn type2_h1(z: &CVec, w1: &CVec) -> CMat {
    let wzd = col(w1) * vdag(z);
    wzd.adjoint() - null_projector_vec(z) * wzd
}

/// Type-2 dissipative mapping: `Δ1 + Δ1* ⪰ 0`, `Δ2` free.
pub fn dsdm_type2(p: &DsmProblem, cfg: &ToleranceConfig) -> Result<DsmSolution> {
    p.validate()?;
    p.require_nonzero(&["z", "x2", "w1", "w2"])?;
    p.check_compatible(cfg)?;
    let zw = dot(&p.z, &p.w1);
    let tol = cfg.residual_tol * p.z.norm() * p.w1.norm();
    if zw.re < -tol {
        return Err(Error::Infeasible(format!("Re(z*w1) < 0 ({:.3e})", zw.re)));
    }
    let boundary = zw.re.abs() <= tol;
    let h1 = type2_h1(&p.z, &p.w1);
    let ytil = &p.y - &h1 * &p.x1;
    let h2 = two_sided_raw(&p.x2, &ytil, &p.z, &p.w2);
    let upper = (h1.norm_squared() + h2.norm_squared()).sqrt();

    let orth = dot(&p.z, &p.x1).norm() <= cfg.colinearity_tol * p.z.norm() * p.x1.norm();
    let classical_condition = match colinear_factor(&p.y, &p.z, cfg.colinearity_tol) {
        Some(beta) if orth => Some(Sufficiency::ColinearOrthogonal { beta }),
        _ => None,
    };
    // ‖Δ1‖ is at least the minimal dissipative norm with Δ1*z = w1, and
    // ‖Δ2‖ ≥ ‖Δ2*z‖/‖z‖.
    let d1 = if boundary {
        h1.norm_squared()
    } else {
        dissipative_min(&p.z, &p.w1).norm_squared()
    };
    let split = (d1 + p.w2.norm_squared() / p.z.norm_squared()).sqrt();
    let unstructured = two_sided_raw(&p.x(), &p.y, &p.z, &p.w()).norm();
    let mut lower = split.max(unstructured);
    let exact = upper * upper - lower * lower <= cfg.residual_tol * upper * upper;
    let sufficiency = if exact {
        lower = upper;
        Sufficiency::LowerBoundAttained
    } else {
        Sufficiency::Never
    };
    Ok(DsmSolution {
        family: StructureFamily::Dissipative,
        h1,
        h2,
        norm_lower: lower,
        norm_upper: upper,
        exact,
        sufficiency,
        psd_diagnostics: None,
        classical_condition,
        boundary,
    })
}

/// Free matrices `(Z, K, G, R)` of the Type-2 characterization.
#[derive(Debug, Clone)]
pub struct Type2Params {
    pub z: CMat,
    pub k: CMat,
    pub g: CMat,
    pub r: CMat,
}

impl Type2Params {
    /// `Z = −2(w1z†)*`, `K = G = 0`, `R = 0`: the parameters of `[Ĥ1 Ĥ2]`.
    pub fn minimizer(p: &DsmProblem) -> Self {
        let (n, m) = (p.n(), p.m());
        Self {
            z: (col(&p.w1) * vdag(&p.z)).adjoint().map(|v| v * -2.0),
            k: CMat::zeros(n, n),
            g: CMat::zeros(n, n),
            r: CMat::zeros(n, m),
        }
    }
}

/// Evaluate `H + H̃(Z, K, G, R)`; requires `Re(z*w1) > 0` and the parameter
/// constraints `G* = −G`, `K ⪰ 0`, `K − (2w1 + Z*z)(2w1 + Z*z)*/(4Re z*w1) ⪰ 0`.
pub fn dsm_characterize_type2(p: &DsmProblem, params: &Type2Params, cfg: &ToleranceConfig) -> Result<CMat> {
    p.validate()?;
    p.require_nonzero(&["z", "x2", "w1", "w2"])?;
    p.check_compatible(cfg)?;
    let (n, m) = (p.n(), p.m());
    if params.r.shape() != (n, m) {
        return Err(Error::DimensionMismatch(format!("R must be {n}x{m}")));
    }
    if dot(&p.z, &p.w1).re <= 0.0 {
        return Err(Error::Infeasible("the characterization needs Re(z*w1) > 0".into()));
    }
    check_dissipative_params(&p.z, &p.w1, &params.z, &params.k, &params.g, cfg).map_err(|e| match e {
        Error::ConstraintViolation(s) => Error::ConstraintViolation(format!("{s} [with x → z, y → w1]")),
        other => other,
    })?;
    let pz = null_projector_vec(&p.z);
    let zd = vdag(&p.z);
    let wzd = col(&p.w1) * &zd;
    let d1 = wzd.adjoint() + &pz * &wzd + &pz * params.z.adjoint() * col(&p.z) * &zd + &pz * &params.k * &pz
        - &pz * &params.g * &pz;
    let ytil = &p.y - &d1 * &p.x1;
    let d2 = two_sided_raw(&p.x2, &ytil, &p.z, &p.w2) + &pz * &params.r * null_projector_vec(&p.x2);
    Ok(hstack(&d1, &d2))
}
