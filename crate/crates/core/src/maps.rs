//! Minimal-norm structured mappings `Δx = y` for a single structure, and the
//! two-sided unstructured mapping `Δx = y, Δ*z = w`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::linalg::{
    c, col, dot, dot_t, herm_part, hermitian_deviation, min_eigenvalue, null_projector_vec, outer,
    skew_part, skew_sym_part, sym_part, vdag, CMat, CVec, ToleranceConfig, I,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StructureFamily {
    Unstructured,
    Hermitian,
    SkewHermitian,
    Symmetric,
    SkewSymmetric,
    Psd,
    Nsd,
    Dissipative,
    AntiDissipative,
}

impl StructureFamily {
    pub const ALL: [StructureFamily; 9] = [
        StructureFamily::Unstructured,
        StructureFamily::Hermitian,
        StructureFamily::SkewHermitian,
        StructureFamily::Symmetric,
        StructureFamily::SkewSymmetric,
        StructureFamily::Psd,
        StructureFamily::Nsd,
        StructureFamily::Dissipative,
        StructureFamily::AntiDissipative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StructureFamily::Unstructured => "unstructured",
            StructureFamily::Hermitian => "hermitian",
            StructureFamily::SkewHermitian => "skew-hermitian",
            StructureFamily::Symmetric => "symmetric",
            StructureFamily::SkewSymmetric => "skew-symmetric",
            StructureFamily::Psd => "psd",
            StructureFamily::Nsd => "nsd",
            StructureFamily::Dissipative => "dissipative",
            StructureFamily::AntiDissipative => "anti-dissipative",
        }
    }

    /// True when the family is a real-linear subspace (no cone constraint).
    pub fn is_linear(self) -> bool {
        !matches!(
            self,
            StructureFamily::Psd | StructureFamily::Nsd | StructureFamily::Dissipative | StructureFamily::AntiDissipative
        )
    }
}

impl fmt::Display for StructureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StructureFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.to_ascii_lowercase().chars().filter(|ch| ch.is_ascii_alphanumeric()).collect();
        Ok(match key.as_str() {
            "unstructured" | "general" | "none" => StructureFamily::Unstructured,
            "hermitian" | "herm" => StructureFamily::Hermitian,
            "skewhermitian" | "sherm" => StructureFamily::SkewHermitian,
            "symmetric" | "sym" => StructureFamily::Symmetric,
            "skewsymmetric" | "ssym" => StructureFamily::SkewSymmetric,
            "psd" => StructureFamily::Psd,
            "nsd" => StructureFamily::Nsd,
            "dissipative" | "diss" => StructureFamily::Dissipative,
            "antidissipative" | "antidiss" => StructureFamily::AntiDissipative,
            _ => return Err(Error::Parse(format!("unknown structure family '{s}'"))),
        })
    }
}

/// Project a matrix exactly onto a linear family; cone families are left as
/// their Hermitian part (PSD/NSD) or untouched (dissipative).
pub fn project_family(family: StructureFamily, a: &CMat) -> CMat {
    match family {
        StructureFamily::Hermitian | StructureFamily::Psd | StructureFamily::Nsd => herm_part(a),
        StructureFamily::SkewHermitian => skew_part(a),
        StructureFamily::Symmetric => sym_part(a),
        StructureFamily::SkewSymmetric => skew_sym_part(a),
        _ => a.clone(),
    }
}

/// Relative deviation of `a` from the family, and the smallest eigenvalue of
/// the relevant Hermitian matrix for cone families (`None` otherwise).
pub fn structure_deviation(family: StructureFamily, a: &CMat) -> (f64, Option<f64>) {
    let nrm = a.norm().max(f64::MIN_POSITIVE);
    match family {
        StructureFamily::Unstructured => (0.0, None),
        StructureFamily::Hermitian => (hermitian_deviation(a), None),
        StructureFamily::SkewHermitian => ((a + a.adjoint()).norm() / nrm, None),
        StructureFamily::Symmetric => ((a - a.transpose()).norm() / nrm, None),
        StructureFamily::SkewSymmetric => ((a + a.transpose()).norm() / nrm, None),
        StructureFamily::Psd => (hermitian_deviation(a), Some(min_eigenvalue(a))),
        StructureFamily::Nsd => (hermitian_deviation(a), Some(min_eigenvalue(&-a))),
        StructureFamily::Dissipative => (0.0, Some(min_eigenvalue(&(a + a.adjoint())))),
        StructureFamily::AntiDissipative => (0.0, Some(min_eigenvalue(&-(a + a.adjoint())))),
    }
}

#[derive(Debug, Clone)]
pub struct MapSolution {
    pub family: StructureFamily,
    pub minimizer: CMat,
    pub min_norm: f64,
    /// Dissipative with `Re(x*y) ≈ 0`: feasible, but minimality is not certified.
    pub boundary: bool,
    pub free_params: &'static str,
    /// Dissipative families: the classical candidate `yx† − (yx†)*𝒫x`. It
    /// interpolates and is dissipative, but is larger than `minimizer`
    /// whenever `Re(x*y) > 0` and `y` is not parallel to `x`.
    pub classical: Option<CMat>,
}

fn check_pair(x: &CVec, y: &CVec) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!("x has {} entries, y has {}", x.len(), y.len())));
    }
    if x.norm() == 0.0 || y.norm() == 0.0 {
        return Err(Error::DegenerateInput("x and y must be nonzero".into()));
    }
    Ok(())
}

fn free_params_of(family: StructureFamily) -> &'static str {
    match family {
        StructureFamily::Unstructured => "Z: arbitrary n×n; Δ = yx† + Z𝒫x",
        StructureFamily::Hermitian => "H: Hermitian n×n; Δ = Δ̂ + 𝒫x H 𝒫x",
        StructureFamily::SkewHermitian => "S: skew-Hermitian n×n; Δ = Δ̂ + 𝒫x S 𝒫x",
        StructureFamily::Symmetric => "H: symmetric n×n; Δ = Δ̂ + 𝒫xᵀ H 𝒫x",
        StructureFamily::SkewSymmetric => "H: skew-symmetric n×n; Δ = Δ̂ + 𝒫xᵀ H 𝒫x",
        StructureFamily::Psd => "K ⪰ 0; Δ = yy*/(x*y) + 𝒫x K 𝒫x",
        StructureFamily::Nsd => "K ⪰ 0; Δ = yy*/(x*y) − 𝒫x K 𝒫x",
        StructureFamily::Dissipative => {
            "Z arbitrary, K ⪰ 0, G skew-Hermitian, K − (2y+Z*x)(2y+Z*x)*/(4Re x*y) ⪰ 0; \
             Δ = yx† + (yx†)*𝒫x + xx†Z𝒫x + 𝒫x K 𝒫x + 𝒫x G 𝒫x"
        }
        StructureFamily::AntiDissipative => "as dissipative, applied to (x, −y), result negated",
    }
}

/// Minimal Frobenius-norm `Δ` with `Δx = y` in the given family.
pub fn map_min(family: StructureFamily, x: &CVec, y: &CVec, cfg: &ToleranceConfig) -> Result<MapSolution> {
    check_pair(x, y)?;
    let scale = x.norm() * y.norm();
    let tol = cfg.residual_tol * scale;
    let xy = dot(x, y);
    let xd = vdag(x);
    let yxd = col(y) * &xd;
    let xxd = col(x) * &xd;
    let s = (&xd * col(y))[(0, 0)];
    let mut boundary = false;
    let mut classical = None;
    let minimizer = match family {
        StructureFamily::Unstructured => yxd,
        StructureFamily::Hermitian => {
            if xy.im.abs() > tol {
                return Err(Error::Infeasible(format!("x*y not real (Im = {:.3e})", xy.im)));
            }
            let sr = c(s.re, 0.0);
            herm_part(&(&yxd + yxd.adjoint() - xxd.map(|v| v * sr)))
        }
        StructureFamily::SkewHermitian => {
            if xy.re.abs() > tol {
                return Err(Error::Infeasible(format!("x*y not imaginary (Re = {:.3e})", xy.re)));
            }
            let si = I * s.im;
            skew_part(&(&yxd - yxd.adjoint() - xxd.map(|v| v * si)))
        }
        StructureFamily::Symmetric => sym_part(&(&yxd + yxd.transpose() - xxd.transpose() * &yxd)),
        StructureFamily::SkewSymmetric => {
            let xty = dot_t(x, y);
            if xty.norm() > tol {
                return Err(Error::Infeasible(format!("xᵀy nonzero (|xᵀy| = {:.3e})", xty.norm())));
            }
            skew_sym_part(&(&yxd - yxd.transpose() + xxd.transpose() * &yxd))
        }
        StructureFamily::Psd => {
            if xy.im.abs() > tol || xy.re <= tol {
                return Err(Error::Infeasible("x*y not positive".into()));
            }
            herm_part(&outer(y, y).map(|v| v / xy.re))
        }
        StructureFamily::Dissipative => {
            if xy.re < -tol {
                return Err(Error::Infeasible(format!("Re(x*y) negative ({:.3e})", xy.re)));
            }
            boundary = xy.re.abs() <= tol;
            let p = null_projector_vec(x);
            let d = &yxd - yxd.adjoint() * p;
            classical = Some(d.clone());
            if !boundary {
                dissipative_min(x, y)
            } else {
                let lmin = min_eigenvalue(&(&d + d.adjoint()));
                if lmin < -cfg.psd_tol * d.norm() {
                    return Err(Error::Infeasible(format!(
                        "boundary case Re(x*y) ≈ 0 and the candidate is not dissipative (λmin = {lmin:.3e})"
                    )));
                }
                d
            }
        }
        StructureFamily::Nsd | StructureFamily::AntiDissipative => {
            let base = if family == StructureFamily::Nsd {
                StructureFamily::Psd
            } else {
                StructureFamily::Dissipative
            };
            let mut sol = map_min(base, x, &-y, cfg)?;
            sol.minimizer = -sol.minimizer;
            sol.classical = sol.classical.map(|m| -m);
            sol.family = family;
            sol.free_params = free_params_of(family);
            return Ok(sol);
        }
    };
    Ok(MapSolution {
        family,
        min_norm: minimizer.norm(),
        minimizer,
        boundary,
        free_params: free_params_of(family),
        classical,
    })
}

/// The shrink factor `s ∈ [0, 1]` of the minimal dissipative map: the root
/// of `s = κ(1−s)³` with `κ = ‖𝒫x y‖²‖x‖²/(8 Re(x*y)²)`, and 1 on the boundary.
fn dissipative_shrink(x: &CVec, y: &CVec) -> f64 {
    let x2 = x.norm_squared();
    let re = dot(x, y).re;
    let py = y - x * (dot(x, y) / x2);
    let kappa = py.norm_squared() * x2 / (8.0 * re * re);
    if py.norm_squared() == 0.0 {
        return 0.0;
    }
    if re <= 0.0 || !kappa.is_finite() {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > f64::EPSILON {
        let mid = 0.5 * (lo + hi);
        if mid - kappa * (1.0 - mid).powi(3) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimal-norm dissipative `Δ` with `Δx = y`, for `Re(x*y) ≥ 0`.
///
/// With `x̂ = x/‖x‖`, `ŷ = y/‖x‖`, `a = x̂*ŷ` and `c = 𝒫x ŷ`, every solution
/// is `ŷx̂* + x̂r* + D` with `r ⊥ x` and `D + D* ⪰ (c+r)(c+r)*/(2 Re a)` on
/// `range 𝒫x`. The optimum has `D = (c+r)(c+r)*/(4 Re a)` and `r = −sc`
/// with `s` from [`dissipative_shrink`].
pub fn dissipative_min(x: &CVec, y: &CVec) -> CMat {
    let nx = x.norm();
    let xh = x / c(nx, 0.0);
    let yh = y / c(nx, 0.0);
    let a = dot(&xh, &yh);
    let cv = &yh - &xh * a;
    let s = dissipative_shrink(x, y);
    let mut d = col(&yh) * xh.adjoint() - col(&xh) * cv.adjoint() * c(s, 0.0);
    if s < 1.0 {
        d += outer(&cv, &cv) * c((1.0 - s).powi(2) / (4.0 * a.re), 0.0);
    }
    d
}

/// `‖Δ‖_F²` for [`dissipative_min`], from the scalar reduction.
pub fn dissipative_min_norm_sq(x: &CVec, y: &CVec) -> f64 {
    dissipative_min(x, y).norm_squared()
}

/// `2‖y‖²/‖x‖² − |x*y|²/‖x‖⁴`, the squared norm of `yx† − (yx†)*𝒫x`.
pub fn dissipative_norm_sq(x: &CVec, y: &CVec) -> f64 {
    let x2 = x.norm_squared();
    2.0 * y.norm_squared() / x2 - dot(x, y).norm_sqr() / (x2 * x2)
}

/// `yx† + (wz†)* − (wz†)* x x†` without feasibility checks; zero vectors are
/// handled through `0† = 0`.
pub fn two_sided_raw(x: &CVec, y: &CVec, z: &CVec, w: &CVec) -> CMat {
    let xd = vdag(x);
    let wzd_adj = (col(w) * vdag(z)).adjoint();
    col(y) * &xd + &wzd_adj - &wzd_adj * col(x) * &xd
}

/// Minimal-norm `Δ ∈ C^{n×m}` with `Δx = y`, `Δ*z = w`.
pub fn map_two_sided(x: &CVec, y: &CVec, z: &CVec, w: &CVec, cfg: &ToleranceConfig) -> Result<MapSolution> {
    if x.len() != w.len() || y.len() != z.len() {
        return Err(Error::DimensionMismatch(format!(
            "need x,w of equal length and y,z of equal length (got {}, {}, {}, {})",
            x.len(),
            w.len(),
            y.len(),
            z.len()
        )));
    }
    if x.norm() == 0.0 || y.norm() == 0.0 || z.norm() == 0.0 || w.norm() == 0.0 {
        return Err(Error::DegenerateInput("x, y, z, w must be nonzero".into()));
    }
    let gap = dot(x, w) - dot(y, z);
    let scale = x.norm() * w.norm() + y.norm() * z.norm();
    if gap.norm() > cfg.residual_tol * scale {
        return Err(Error::Infeasible(format!("x*w ≠ y*z (gap {:.3e})", gap.norm())));
    }
    let d = two_sided_raw(x, y, z, w);
    Ok(MapSolution {
        family: StructureFamily::Unstructured,
        min_norm: d.norm(),
        minimizer: d,
        boundary: false,
        classical: None,
        free_params: "R: arbitrary n×m; Δ = Δ̂ + 𝒫z R 𝒫x",
    })
}

/// Free matrices of a single-map characterization.
#[derive(Debug, Clone)]
pub enum MapParams {
    /// Unstructured `Z`, or the symmetric matrix `H`/`S` of the linear families.
    Matrix(CMat),
    /// `K ⪰ 0` for PSD / NSD.
    Psd(CMat),
    /// `(Z, K, G)` for dissipative / anti-dissipative.
    Dissipative { z: CMat, k: CMat, g: CMat },
}

fn require_square(a: &CMat, n: usize, what: &str) -> Result<()> {
    if a.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!("{what} must be {n}x{n}, got {}x{}", a.nrows(), a.ncols())));
    }
    Ok(())
}

fn require_psd(k: &CMat, cfg: &ToleranceConfig, what: &str) -> Result<()> {
    if hermitian_deviation(k) > cfg.residual_tol {
        return Err(Error::ConstraintViolation(format!("{what} is not Hermitian")));
    }
    let lmin = min_eigenvalue(k);
    if lmin < -cfg.psd_tol * k.norm().max(1.0) {
        return Err(Error::ConstraintViolation(format!("{what} ⪰ 0 fails (λmin = {lmin:.3e})")));
    }
    Ok(())
}

/// Check the constraint set of the dissipative characterization for `(x, y)`.
pub fn check_dissipative_params(
    x: &CVec,
    y: &CVec,
    z: &CMat,
    k: &CMat,
    g: &CMat,
    cfg: &ToleranceConfig,
) -> Result<()> {
    let n = x.len();
    for (m, nm) in [(z, "Z"), (k, "K"), (g, "G")] {
        require_square(m, n, nm)?;
    }
    if (g + g.adjoint()).norm() > cfg.residual_tol * g.norm().max(1.0) {
        return Err(Error::ConstraintViolation("G is not skew-Hermitian".into()));
    }
    require_psd(k, cfg, "K")?;
    let re = dot(x, y).re;
    if re <= 0.0 {
        return Err(Error::ConstraintViolation("Re(x*y) must be positive for the characterization".into()));
    }
    let v = y * c(2.0, 0.0) + z.adjoint() * x;
    let t = outer(&v, &v).map(|e| e / (4.0 * re));
    let schur = herm_part(&(k - &t));
    let lmin = min_eigenvalue(&schur);
    if lmin < -cfg.psd_tol * (k.norm() + t.norm()).max(1.0) {
        return Err(Error::ConstraintViolation(format!(
            "K − (2y+Z*x)(2y+Z*x)*/(4Re(x*y)) ⪰ 0 fails (λmin = {lmin:.3e})"
        )));
    }
    Ok(())
}

/// Evaluate the characterization of all solutions at the given free matrices.
pub fn map_characterize(
    family: StructureFamily,
    x: &CVec,
    y: &CVec,
    params: &MapParams,
    cfg: &ToleranceConfig,
) -> Result<CMat> {
    check_pair(x, y)?;
    let n = x.len();
    let p = null_projector_vec(x);
    let wrong = || Error::ConstraintViolation(format!("parameter kind does not match family {family}"));
    match (family, params) {
        (StructureFamily::Unstructured, MapParams::Matrix(zm)) => {
            require_square(zm, n, "Z")?;
            Ok(col(y) * vdag(x) + zm * p)
        }
        (StructureFamily::Hermitian, MapParams::Matrix(h)) => {
            require_square(h, n, "H")?;
            if hermitian_deviation(h) > cfg.residual_tol {
                return Err(Error::ConstraintViolation("H is not Hermitian".into()));
            }
            Ok(map_min(family, x, y, cfg)?.minimizer + &p * h * &p)
        }
        (StructureFamily::SkewHermitian, MapParams::Matrix(s)) => {
            require_square(s, n, "S")?;
            if (s + s.adjoint()).norm() > cfg.residual_tol * s.norm().max(1.0) {
                return Err(Error::ConstraintViolation("S is not skew-Hermitian".into()));
            }
            Ok(map_min(family, x, y, cfg)?.minimizer + &p * s * &p)
        }
        (StructureFamily::Symmetric, MapParams::Matrix(h)) | (StructureFamily::SkewSymmetric, MapParams::Matrix(h)) => {
            require_square(h, n, "H")?;
            let sign = if family == StructureFamily::Symmetric { 1.0 } else { -1.0 };
            if (h - h.transpose().map(|v| v * sign)).norm() > cfg.residual_tol * h.norm().max(1.0) {
                return Err(Error::ConstraintViolation(format!(
                    "H is not {}",
                    if sign > 0.0 { "symmetric" } else { "skew-symmetric" }
                )));
            }
            Ok(map_min(family, x, y, cfg)?.minimizer + p.transpose() * h * &p)
        }
        (StructureFamily::Psd, MapParams::Psd(k)) => {
            require_square(k, n, "K")?;
            require_psd(k, cfg, "K")?;
            Ok(map_min(family, x, y, cfg)?.minimizer + &p * k * &p)
        }
        (StructureFamily::Nsd, MapParams::Psd(_)) => Ok(-map_characterize(StructureFamily::Psd, x, &-y, params, cfg)?),
        (StructureFamily::Dissipative, MapParams::Dissipative { z, k, g }) => {
            let xy = dot(x, y);
            if xy.re < 0.0 {
                return Err(Error::Infeasible("Re(x*y) negative".into()));
            }
            check_dissipative_params(x, y, z, k, g, cfg)?;
            let xd = vdag(x);
            let yxd = col(y) * &xd;
            let xxd = col(x) * &xd;
            Ok(&yxd + yxd.adjoint() * &p + xxd * z * &p + &p * k * &p + &p * g * &p)
        }
        (StructureFamily::AntiDissipative, MapParams::Dissipative { .. }) => {
            Ok(-map_characterize(StructureFamily::Dissipative, x, &-y, params, cfg)?)
        }
        _ => Err(wrong()),
    }
}

/// Parameters for which the dissipative characterization returns the minimizer.
pub fn dissipative_minimizer_params(x: &CVec, y: &CVec) -> MapParams {
    let n = x.len();
    let s = dissipative_shrink(x, y);
    let yxd = col(y) * vdag(x);
    let k = if s < 1.0 {
        outer(y, y).map(|v| v * (1.0 - s).powi(2) / (4.0 * dot(x, y).re))
    } else {
        CMat::zeros(n, n)
    };
    MapParams::Dissipative {
        z: yxd.adjoint().map(|v| v * -(1.0 + s)),
        k,
        g: CMat::zeros(n, n),
    }
}

/// Parameters reproducing the classical candidate `yx† − (yx†)*𝒫x`.
pub fn dissipative_classical_params(x: &CVec, y: &CVec) -> MapParams {
    let n = x.len();
    let yxd = col(y) * vdag(x);
    MapParams::Dissipative {
        z: yxd.adjoint().map(|v| v * -2.0),
        k: CMat::zeros(n, n),
        g: CMat::zeros(n, n),
    }
}

/// Interpolation residual relative to `‖Δ‖‖x‖ + ‖y‖`.
pub fn interpolation_residual(d: &CMat, x: &CVec, y: &CVec) -> f64 {
    (d * x - y).norm() / (d.norm() * x.norm() + y.norm()).max(f64::MIN_POSITIVE)
}
