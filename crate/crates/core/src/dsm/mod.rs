//! Doubly structured mappings: `Δ = [Δ1 Δ2]` with `Δx = y`, `Δ*z = w` and
//! `Δ1` confined to a structure family.
//!
//! Every solver returns the base solution `H = [H1 H2]` together with a norm
//! bracket. The upper end is always `‖H‖_F`. The lower end is the split bound
//! `‖H1‖² + inf_K ‖H2 + H̃2(K, 0)‖²` (the inner infimum has a closed form for
//! each family) or the unstructured two-sided minimum, whichever is larger.
//! When the bracket closes, `exact` is set and the note records why.

mod dissipative;
mod reduction;

pub use dissipative::{
    dsdm_type1, dsdm_type1_anti, dsdm_type1_vec, dsdm_type1_vec_anti, dsdm_type2, dsm_characterize_type2,
    Type1Problem, Type1Solution, Type2Params,
};
pub use reduction::{jordan_lie_reduce, Algebra, Form, ScalarProduct};

use num_complex::Complex64;

use crate::linalg::{
    col, colinear_factor, conj_vec, dot, eigenvalues, hermitian_deviation, min_eigenvalue, null_projector_vec,
    vdag, CMat, CVec, ToleranceConfig,
};
use crate::maps::{map_min, two_sided_raw, StructureFamily};
use crate::{Error, Result};

/// Data of `Δx = y`, `Δ*z = w` with `x = [x1; x2]`, `w = [w1; w2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DsmProblem {
    pub x1: CVec,
    pub x2: CVec,
    pub y: CVec,
    pub z: CVec,
    pub w1: CVec,
    pub w2: CVec,
}

impl DsmProblem {
    pub fn new(x1: CVec, x2: CVec, y: CVec, z: CVec, w1: CVec, w2: CVec) -> Result<Self> {
        let p = Self { x1, x2, y, z, w1, w2 };
        p.validate()?;
        Ok(p)
    }

    /// Split stacked `x, w ∈ C^{n+m}` after the first `n` entries.
    pub fn from_stacked(n: usize, x: &CVec, y: &CVec, z: &CVec, w: &CVec) -> Result<Self> {
        if x.len() < n || w.len() != x.len() {
            return Err(Error::DimensionMismatch(format!(
                "x and w must have equal length ≥ n = {n} (got {} and {})",
                x.len(),
                w.len()
            )));
        }
        let m = x.len() - n;
        Self::new(
            x.rows(0, n).into_owned(),
            x.rows(n, m).into_owned(),
            y.clone(),
            z.clone(),
            w.rows(0, n).into_owned(),
            w.rows(n, m).into_owned(),
        )
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn m(&self) -> usize {
        self.x2.len()
    }

    pub fn x(&self) -> CVec {
        stack(&self.x1, &self.x2)
    }

    pub fn w(&self) -> CVec {
        stack(&self.w1, &self.w2)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        for (v, name) in [(&self.x1, "x1"), (&self.z, "z"), (&self.w1, "w1")] {
            if v.len() != n {
                return Err(Error::DimensionMismatch(format!("{name} has {} entries, expected n = {n}", v.len())));
            }
        }
        if self.w2.len() != self.m() {
            return Err(Error::DimensionMismatch(format!(
                "w2 has {} entries, x2 has {}",
                self.w2.len(),
                self.m()
            )));
        }
        let finite = |v: &CVec| v.iter().all(|e| e.re.is_finite() && e.im.is_finite());
        if ![&self.x1, &self.x2, &self.y, &self.z, &self.w1, &self.w2].into_iter().all(finite) {
            return Err(Error::DegenerateInput("non-finite entries".into()));
        }
        Ok(())
    }

    /// `|x*w − y*z|` and the scale it is compared against.
    pub fn compatibility_gap(&self) -> (f64, f64) {
        let gap = dot(&self.x1, &self.w1) + dot(&self.x2, &self.w2) - dot(&self.y, &self.z);
        let scale = self.x().norm() * self.w().norm() + self.y.norm() * self.z.norm();
        (gap.norm(), scale)
    }

    fn check_compatible(&self, cfg: &ToleranceConfig) -> Result<()> {
        let (gap, scale) = self.compatibility_gap();
        if gap > cfg.residual_tol * scale {
            return Err(Error::Infeasible(format!("x*w ≠ y*z (gap {gap:.3e})")));
        }
        Ok(())
    }

    fn require_nonzero(&self, names: &[&str]) -> Result<()> {
        for &name in names {
            let v = match name {
                "x2" => &self.x2,
                "z" => &self.z,
                "w1" => &self.w1,
                "w2" => &self.w2,
                _ => unreachable!(),
            };
            if v.norm() == 0.0 {
                return Err(Error::DegenerateInput(format!("{name} must be nonzero")));
            }
        }
        Ok(())
    }

    /// Interpolation residuals `‖Δx − y‖` and `‖Δ*z − w‖`, each relative to
    /// `‖Δ‖‖input‖ + ‖output‖`.
    pub fn residuals(&self, delta: &CMat) -> (f64, f64) {
        let x = self.x();
        let w = self.w();
        let dn = delta.norm();
        let r1 = (delta * &x - &self.y).norm() / (dn * x.norm() + self.y.norm()).max(f64::MIN_POSITIVE);
        let r2 = (delta.adjoint() * &self.z - &w).norm() / (dn * self.z.norm() + w.norm()).max(f64::MIN_POSITIVE);
        (r1, r2)
    }
}

pub(crate) fn stack(a: &CVec, b: &CVec) -> CVec {
    CVec::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// Which sufficient condition closed the norm bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sufficiency {
    /// `x1 = αz` (Hermitian, skew-Hermitian, semidefinite families).
    Colinear { alpha: Complex64 },
    /// `x1 = α z̄` (symmetric and skew-symmetric families).
    ConjugateColinear { alpha: Complex64 },
    /// `y = βz` with `z ⟂ x1` (dissipative family). Only ever reported in
    /// [`DsmSolution::classical_condition`]; it does not close the bracket.
    ColinearOrthogonal { beta: Complex64 },
    /// The split lower bound equals `‖H‖_F` (includes the anti-aligned
    /// semidefinite case `𝒫_z ỹ = c 𝒫_z x1`, `Re c ≤ 0`).
    LowerBoundAttained,
    /// Nothing fired; only the bracket is certified.
    Never,
}

impl Sufficiency {
    pub fn note(&self) -> &'static str {
        match self {
            Sufficiency::Colinear { .. } => "x1 = αz",
            Sufficiency::ConjugateColinear { .. } => "x1 = αz̄",
            Sufficiency::ColinearOrthogonal { .. } => "y = βz and z ⟂ x1",
            Sufficiency::LowerBoundAttained => "lower bound attained",
            Sufficiency::Never => "none",
        }
    }
}

/// Spectral test on `𝓜 = y x1* − (w1*x1/(z*w1)) w1 x1*` for the PSD family.
///
/// Reported only: closed-left-half-plane spectrum of `𝓜` does not by itself
/// make `H` minimal, so it never sets `exact`.
#[derive(Debug, Clone)]
pub struct PsdDiagnostics {
    pub m: CMat,
    pub rightmost_re: f64,
    pub spectrum_in_left_half_plane: bool,
}

#[derive(Debug, Clone)]
pub struct DsmSolution {
    pub family: StructureFamily,
    pub h1: CMat,
    pub h2: CMat,
    pub norm_lower: f64,
    pub norm_upper: f64,
    pub exact: bool,
    pub sufficiency: Sufficiency,
    pub psd_diagnostics: Option<PsdDiagnostics>,
    /// Dissipative: `ColinearOrthogonal` when `y = βz` and `z ⟂ x1`. The
    /// minimal dissipative `Δ1` with `Δ1*z = w1` is in general not `Ĥ1`, so
    /// this condition alone does not make `H` minimal.
    pub classical_condition: Option<Sufficiency>,
    /// Dissipative with `Re(z*w1) ≈ 0`: `H` is feasible but the
    /// characterization of all solutions does not apply.
    pub boundary: bool,
}

impl DsmSolution {
    /// `[H1 H2]`.
    pub fn delta(&self) -> CMat {
        hstack(&self.h1, &self.h2)
    }

    pub fn sufficiency_note(&self) -> &'static str {
        self.sufficiency.note()
    }
}

pub(crate) fn hstack(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows();
    let mut out = CMat::zeros(n, a.ncols() + b.ncols());
    out.view_mut((0, 0), (n, a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (n, b.ncols())).copy_from(b);
    out
}

/// Minimal-norm structured `H1` with `H1* z = w1`, after the family's
/// feasibility test.
fn family_h1(family: StructureFamily, p: &DsmProblem, cfg: &ToleranceConfig) -> Result<CMat> {
    let (z, w1) = (&p.z, &p.w1);
    let zw = dot(z, w1);
    let tol = cfg.residual_tol * z.norm() * w1.norm();
    match family {
        StructureFamily::Hermitian => {
            if zw.im.abs() > tol {
                return Err(Error::Infeasible(format!("z*w1 not real (Im = {:.3e})", zw.im)));
            }
            Ok(map_min(family, z, w1, cfg)?.minimizer)
        }
        StructureFamily::SkewHermitian => {
            if zw.re.abs() > tol {
                return Err(Error::Infeasible(format!("z*w1 not imaginary (Re = {:.3e})", zw.re)));
            }
            Ok(map_min(family, z, &-w1, cfg)?.minimizer)
        }
        StructureFamily::Symmetric => Ok(map_min(family, &conj_vec(z), &conj_vec(w1), cfg)?.minimizer),
        StructureFamily::SkewSymmetric => {
            let ztw = crate::linalg::dot_t(z, w1);
            if ztw.norm() > tol {
                return Err(Error::Infeasible(format!("zᵀw1 nonzero (|zᵀw1| = {:.3e})", ztw.norm())));
            }
            Ok(map_min(family, &conj_vec(z), &-conj_vec(w1), cfg)?.minimizer)
        }
        StructureFamily::Psd => {
            if zw.im.abs() > tol || zw.re <= tol {
                return Err(Error::Infeasible(format!("z*w1 not positive (z*w1 = {zw:.3e})")));
            }
            Ok(map_min(family, z, w1, cfg)?.minimizer)
        }
        _ => Err(Error::NotImplemented(format!("no Δ1 map for family {family}"))),
    }
}

/// `inf_K ‖(ỹ − T(K)x1) x2† + (w2z†)*𝒫_{x2}‖²` where `T(K)` ranges over the
/// family's free term. Each family's set `{T(K)x1}` is a cone in `range 𝒫_z`
/// cut out by one scalar condition on `v*u`, so the distance is explicit.
fn split_tail_sq(family: StructureFamily, p: &DsmProblem, ytil: &CVec) -> f64 {
    let pz = null_projector_vec(&p.z);
    let pv = &pz * ytil;
    let off = (ytil - &pv).norm_squared();
    let conj_family = matches!(family, StructureFamily::Symmetric | StructureFamily::SkewSymmetric);
    let v = if conj_family {
        conj_vec(&(&pz * conj_vec(&p.x1)))
    } else {
        &pz * &p.x1
    };
    let vn = v.norm();
    let in_range = if vn == 0.0 {
        pv.norm_squared()
    } else {
        // only the component along v is constrained; the rest of range 𝒫_z is matched exactly
        let a = dot(&v, &pv) / vn;
        match family {
            StructureFamily::Hermitian => a.im * a.im,
            StructureFamily::SkewHermitian => a.re * a.re,
            StructureFamily::Psd => a.im * a.im + a.re.min(0.0).powi(2),
            StructureFamily::Symmetric => 0.0,
            StructureFamily::SkewSymmetric => {
                // u ranges over range 𝒫_z ∩ {vᵀu = 0}, and v̄ lies in range 𝒫_z
                let t = crate::linalg::dot_t(&v, &pv) / vn;
                t.norm_sqr()
            }
            _ => unreachable!(),
        }
    };
    let x2 = &p.x2;
    let tail = (col(&p.w2) * vdag(&p.z)).adjoint() * null_projector_vec(x2);
    tail.norm_squared() + (off + in_range) / x2.norm_squared()
}

/// Minimal-norm doubly structured mapping for a structure family.
///
/// Supported: Hermitian, skew-Hermitian, symmetric, skew-symmetric, PSD, NSD,
/// and (via [`dsdm_type2`]) dissipative and anti-dissipative.
pub fn dsm_solve(family: StructureFamily, p: &DsmProblem, cfg: &ToleranceConfig) -> Result<DsmSolution> {
    p.validate()?;
    match family {
        StructureFamily::Unstructured => {
            return Err(Error::NotImplemented("use maps::map_two_sided for the unstructured problem".into()))
        }
        StructureFamily::Nsd => {
            let q = DsmProblem {
                x1: -&p.x1,
                w1: -&p.w1,
                ..p.clone()
            };
            let mut sol = dsm_solve(StructureFamily::Psd, &q, cfg)?;
            sol.h1 = -sol.h1;
            sol.family = family;
            return Ok(sol);
        }
        StructureFamily::Dissipative => return dsdm_type2(p, cfg),
        StructureFamily::AntiDissipative => {
            let q = DsmProblem {
                y: -&p.y,
                w1: -&p.w1,
                w2: -&p.w2,
                ..p.clone()
            };
            let mut sol = dsdm_type2(&q, cfg)?;
            sol.h1 = -sol.h1;
            sol.h2 = -sol.h2;
            sol.family = family;
            return Ok(sol);
        }
        _ => {}
    }
    p.require_nonzero(&["z", "w1", "x2"])?;
    if family == StructureFamily::Psd {
        p.require_nonzero(&["w2"])?;
    }
    p.check_compatible(cfg)?;
    let h1 = family_h1(family, p, cfg)?;
    let ytil = &p.y - &h1 * &p.x1;
    let h2 = two_sided_raw(&p.x2, &ytil, &p.z, &p.w2);
    let upper = (h1.norm_squared() + h2.norm_squared()).sqrt();

    let split = (h1.norm_squared() + split_tail_sq(family, p, &ytil)).sqrt();
    let unstructured = two_sided_raw(&p.x(), &p.y, &p.z, &p.w()).norm();
    let mut lower = split.max(unstructured);

    let conj_family = matches!(family, StructureFamily::Symmetric | StructureFamily::SkewSymmetric);
    let colinear = if conj_family {
        colinear_factor(&p.x1, &conj_vec(&p.z), cfg.colinearity_tol).map(|alpha| Sufficiency::ConjugateColinear { alpha })
    } else {
        colinear_factor(&p.x1, &p.z, cfg.colinearity_tol).map(|alpha| Sufficiency::Colinear { alpha })
    };
    let sufficiency = match colinear {
        Some(s) => s,
        None if upper * upper - lower * lower <= cfg.residual_tol * upper * upper => Sufficiency::LowerBoundAttained,
        None => Sufficiency::Never,
    };
    let exact = sufficiency != Sufficiency::Never;
    if exact {
        lower = upper;
    }

    let psd_diagnostics = (family == StructureFamily::Psd).then(|| {
        let zw = dot(&p.z, &p.w1);
        let coef = dot(&p.w1, &p.x1) / zw;
        let m = col(&p.y) * p.x1.adjoint() - col(&p.w1) * p.x1.adjoint() * coef;
        let rightmost_re = eigenvalues(&m).iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        PsdDiagnostics {
            spectrum_in_left_half_plane: rightmost_re <= 1e-10 * m.norm().max(f64::MIN_POSITIVE),
            rightmost_re,
            m,
        }
    });

    Ok(DsmSolution {
        family,
        h1,
        h2,
        norm_lower: lower,
        norm_upper: upper,
        exact,
        sufficiency,
        psd_diagnostics,
        classical_condition: None,
        boundary: false,
    })
}

/// Check that `k` obeys the constraint attached to the family's free matrix.
fn check_free_k(family: StructureFamily, k: &CMat, cfg: &ToleranceConfig) -> Result<()> {
    let scale = k.norm().max(1.0);
    let bad = |what: &str| Err(Error::ConstraintViolation(format!("K is not {what}")));
    match family {
        StructureFamily::Hermitian if hermitian_deviation(k) > cfg.residual_tol => bad("Hermitian"),
        StructureFamily::SkewHermitian if (k + k.adjoint()).norm() > cfg.residual_tol * scale => bad("skew-Hermitian"),
        StructureFamily::Symmetric if (k - k.transpose()).norm() > cfg.residual_tol * scale => bad("symmetric"),
        StructureFamily::SkewSymmetric if (k + k.transpose()).norm() > cfg.residual_tol * scale => bad("skew-symmetric"),
        StructureFamily::Psd => {
            if hermitian_deviation(k) > cfg.residual_tol {
                return bad("Hermitian");
            }
            let lmin = min_eigenvalue(k);
            if lmin < -cfg.psd_tol * scale {
                return Err(Error::ConstraintViolation(format!("K ⪰ 0 fails (λmin = {lmin:.3e})")));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Evaluate `H + H̃(K, R)` from the characterization of all solutions.
///
/// Returns the `n × (n+m)` matrix `[Δ1 Δ2]`. For NSD the free matrix is the
/// `K ⪰ 0` of the reflected semidefinite problem.
pub fn dsm_characterize(
    family: StructureFamily,
    p: &DsmProblem,
    k: &CMat,
    r: &CMat,
    cfg: &ToleranceConfig,
) -> Result<CMat> {
    let (n, m) = (p.n(), p.m());
    if k.shape() != (n, n) || r.shape() != (n, m) {
        return Err(Error::DimensionMismatch(format!(
            "K must be {n}x{n} and R {n}x{m}, got {}x{} and {}x{}",
            k.nrows(),
            k.ncols(),
            r.nrows(),
            r.ncols()
        )));
    }
    if family == StructureFamily::Nsd {
        let q = DsmProblem {
            x1: -&p.x1,
            w1: -&p.w1,
            ..p.clone()
        };
        let mut d = dsm_characterize(StructureFamily::Psd, &q, k, r, cfg)?;
        let mut d1 = d.view_mut((0, 0), (n, n));
        d1.neg_mut();
        return Ok(d);
    }
    if matches!(
        family,
        StructureFamily::Dissipative | StructureFamily::AntiDissipative | StructureFamily::Unstructured
    ) {
        return Err(Error::NotImplemented(format!(
            "dsm_characterize does not cover {family}; use dsm_characterize_type2"
        )));
    }
    check_free_k(family, k, cfg)?;
    let sol = dsm_solve(family, p, cfg)?;
    let pz = null_projector_vec(&p.z);
    let t = if matches!(family, StructureFamily::Symmetric | StructureFamily::SkewSymmetric) {
        let pzb = null_projector_vec(&conj_vec(&p.z));
        pzb.transpose() * k * pzb
    } else {
        &pz * k * &pz
    };
    let x2d = vdag(&p.x2);
    let px2 = null_projector_vec(&p.x2);
    let d1 = &sol.h1 + &t;
    let d2 = &sol.h2 + &pz * r * px2 - &t * col(&p.x1) * x2d;
    Ok(hstack(&d1, &d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use crate::linalg::c;
    use crate::maps::structure_deviation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn v(xs: &[Complex64]) -> CVec {
        CVec::from_column_slice(xs)
    }

    fn rvec(rng: &mut ChaCha8Rng, n: usize) -> CVec {
        CVec::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn rmat(rng: &mut ChaCha8Rng, n: usize, m: usize) -> CMat {
        CMat::from_fn(n, m, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn member(rng: &mut ChaCha8Rng, family: StructureFamily, n: usize) -> CMat {
        let a = rmat(rng, n, n);
        match family {
            StructureFamily::Hermitian => &a + a.adjoint(),
            StructureFamily::SkewHermitian => &a - a.adjoint(),
            StructureFamily::Symmetric => &a + a.transpose(),
            StructureFamily::SkewSymmetric => &a - a.transpose(),
            StructureFamily::Psd => &a * a.adjoint(),
            StructureFamily::Nsd => -(&a * a.adjoint()),
            StructureFamily::Dissipative => &a * a.adjoint() + (&a - a.adjoint()),
            StructureFamily::AntiDissipative => -(&a * a.adjoint()) + (&a - a.adjoint()),
            StructureFamily::Unstructured => a,
        }
    }

    /// A feasible problem generated from a structured `Δ`.
    pub(crate) fn feasible(rng: &mut ChaCha8Rng, family: StructureFamily, n: usize, m: usize) -> (DsmProblem, CMat) {
        let d1 = member(rng, family, n);
        let d2 = rmat(rng, n, m);
        let d = hstack(&d1, &d2);
        let x = rvec(rng, n + m);
        let z = rvec(rng, n);
        let y = &d * &x;
        let w = d.adjoint() * &z;
        (DsmProblem::from_stacked(n, &x, &y, &z, &w).unwrap(), d)
    }

    #[test]
    fn hermitian_example() {
        let p = DsmProblem::new(v(&[ONE]), v(&[ONE]), v(&[c(2.0, 0.0)]), v(&[ONE]), v(&[ONE]), v(&[ONE])).unwrap();
        let s = dsm_solve(StructureFamily::Hermitian, &p, &cfg()).unwrap();
        assert!((s.h1[(0, 0)] - ONE).norm() < 1e-14);
        assert!((s.h2[(0, 0)] - ONE).norm() < 1e-14);
        assert!(s.exact);
        assert!(matches!(s.sufficiency, Sufficiency::Colinear { .. }));
        assert!((s.norm_upper - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn skew_hermitian_example() {
        let p = DsmProblem::new(
            v(&[ONE]),
            v(&[ONE]),
            v(&[c(1.0, 1.0)]),
            v(&[ONE]),
            v(&[c(0.0, 1.0)]),
            v(&[c(1.0, -2.0)]),
        )
        .unwrap();
        let s = dsm_solve(StructureFamily::SkewHermitian, &p, &cfg()).unwrap();
        assert!((s.h1[(0, 0)] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((s.h2[(0, 0)] - c(1.0, 2.0)).norm() < 1e-14);
        assert!(s.exact);
        assert!((s.norm_upper - 6f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn psd_example_and_infeasible() {
        let p = DsmProblem::new(v(&[ONE]), v(&[ONE]), v(&[c(2.0, 0.0)]), v(&[ONE]), v(&[ONE]), v(&[ONE])).unwrap();
        let s = dsm_solve(StructureFamily::Psd, &p, &cfg()).unwrap();
        assert!((s.h1[(0, 0)] - ONE).norm() < 1e-14 && (s.h2[(0, 0)] - ONE).norm() < 1e-14);
        assert!(s.exact && s.psd_diagnostics.is_some());

        let q = DsmProblem {
            w1: v(&[c(0.0, 1.0)]),
            ..p.clone()
        };
        assert!(matches!(dsm_solve(StructureFamily::Hermitian, &q, &cfg()), Err(Error::Infeasible(_))));
        let q = DsmProblem { y: v(&[c(3.0, 0.0)]), ..p };
        assert!(matches!(dsm_solve(StructureFamily::Hermitian, &q, &cfg()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn zero_x2_rejected() {
        let p = DsmProblem::new(v(&[ONE]), v(&[ZERO]), v(&[ONE]), v(&[ONE]), v(&[ONE]), v(&[ZERO])).unwrap();
        assert!(matches!(dsm_solve(StructureFamily::Hermitian, &p, &cfg()), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn random_feasible_instances_interpolate_and_bracket() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fams = [
            StructureFamily::Hermitian,
            StructureFamily::SkewHermitian,
            StructureFamily::Symmetric,
            StructureFamily::SkewSymmetric,
            StructureFamily::Psd,
            StructureFamily::Nsd,
            StructureFamily::Dissipative,
            StructureFamily::AntiDissipative,
        ];
        for fam in fams {
            for _ in 0..40 {
                let n = rng.gen_range(2..=5);
                let m = rng.gen_range(1..=3);
                let (p, d) = feasible(&mut rng, fam, n, m);
                let s = dsm_solve(fam, &p, &cfg()).unwrap();
                let (r1, r2) = p.residuals(&s.delta());
                assert!(r1 < 1e-11 && r2 < 1e-11, "{fam}: {r1:.2e} {r2:.2e}");
                let (dev, lmin) = structure_deviation(fam, &s.h1);
                assert!(dev < 1e-12, "{fam} dev {dev}");
                if let Some(l) = lmin {
                    assert!(l >= -1e-10 * s.h1.norm(), "{fam} λmin {l}");
                }
                assert!(s.norm_lower <= s.norm_upper * (1.0 + 1e-12), "{fam}");
                // the generating Δ is feasible, hence no smaller than the lower bound
                assert!(s.norm_lower <= d.norm() * (1.0 + 1e-12), "{fam}");
            }
        }
    }

    #[test]
    fn colinear_data_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for fam in [StructureFamily::Hermitian, StructureFamily::Psd, StructureFamily::Symmetric] {
            let n = 3;
            let d1 = member(&mut rng, fam, n);
            let d2 = rmat(&mut rng, n, 2);
            let d = hstack(&d1, &d2);
            let z = rvec(&mut rng, n);
            let x1 = if fam == StructureFamily::Symmetric {
                conj_vec(&z) * c(0.3, -1.1)
            } else {
                &z * c(0.3, -1.1)
            };
            let x = stack(&x1, &rvec(&mut rng, 2));
            let p = DsmProblem::from_stacked(n, &x, &(&d * &x), &z, &(d.adjoint() * &z)).unwrap();
            let s = dsm_solve(fam, &p, &cfg()).unwrap();
            assert!(s.exact, "{fam}");
            assert_eq!(s.norm_lower, s.norm_upper);
            assert!(s.norm_upper <= d.norm() + 1e-12);
        }
    }

    #[test]
    fn characterization_reproduces_base_and_stays_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for fam in [
            StructureFamily::Hermitian,
            StructureFamily::SkewHermitian,
            StructureFamily::Symmetric,
            StructureFamily::SkewSymmetric,
            StructureFamily::Psd,
            StructureFamily::Nsd,
        ] {
            for _ in 0..20 {
                let (p, _) = feasible(&mut rng, fam, 4, 2);
                let s = dsm_solve(fam, &p, &cfg()).unwrap();
                let zero = dsm_characterize(fam, &p, &CMat::zeros(4, 4), &CMat::zeros(4, 2), &cfg()).unwrap();
                assert!((&zero - s.delta()).norm() < 1e-12 * s.norm_upper);
                let kfam = if fam == StructureFamily::Nsd { StructureFamily::Psd } else { fam };
                let k = member(&mut rng, kfam, 4);
                let r = rmat(&mut rng, 4, 2);
                let d = dsm_characterize(fam, &p, &k, &r, &cfg()).unwrap();
                let (r1, r2) = p.residuals(&d);
                assert!(r1 < 1e-11 && r2 < 1e-11, "{fam}");
                let d1 = d.columns(0, 4).into_owned();
                let (dev, lmin) = structure_deviation(fam, &d1);
                assert!(dev < 1e-11, "{fam}");
                if let Some(l) = lmin {
                    assert!(l >= -1e-10 * d1.norm());
                }
                assert!(d.norm() >= s.norm_lower * (1.0 - 1e-12), "{fam}");
            }
        }
    }

    #[test]
    fn characterization_rejects_bad_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (p, _) = feasible(&mut rng, StructureFamily::Hermitian, 3, 1);
        let k = rmat(&mut rng, 3, 3);
        let r = CMat::zeros(3, 1);
        assert!(matches!(
            dsm_characterize(StructureFamily::Hermitian, &p, &k, &r, &cfg()),
            Err(Error::ConstraintViolation(_))
        ));
        let neg = -(&k * k.adjoint());
        let (p, _) = feasible(&mut rng, StructureFamily::Psd, 3, 1);
        assert!(matches!(
            dsm_characterize(StructureFamily::Psd, &p, &neg, &r, &cfg()),
            Err(Error::ConstraintViolation(_))
        ));
    }

    #[test]
    fn hermitian_n1_characterization_is_inert() {
        let p = DsmProblem::new(v(&[ONE]), v(&[ONE]), v(&[c(2.0, 0.0)]), v(&[ONE]), v(&[ONE]), v(&[ONE])).unwrap();
        let k = CMat::identity(1, 1);
        let d = dsm_characterize(StructureFamily::Hermitian, &p, &k, &CMat::zeros(1, 1), &cfg()).unwrap();
        assert!((d[(0, 0)] - ONE).norm() < 1e-14 && (d[(0, 1)] - ONE).norm() < 1e-14);
    }
}
