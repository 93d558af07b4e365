//! Dense complex linear-algebra primitives used by every solver.

use faer::complex_native::c64;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Numerical tolerances. All thresholds are relative except where noted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Singular values below `rank_tol * sigma_max` count as zero.
    pub rank_tol: f64,
    /// Eigenvalue slack for semidefiniteness, scaled by the matrix norm.
    pub psd_tol: f64,
    pub residual_tol: f64,
    pub colinearity_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_tol: 1e-12,
            psd_tol: 1e-10,
            residual_tol: 1e-10,
            colinearity_tol: 1e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_tol", self.rank_tol),
            ("psd_tol", self.psd_tol),
            ("residual_tol", self.residual_tol),
            ("colinearity_tol", self.colinearity_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Structural(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

pub fn all_finite(a: &CMat) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Column vector as an n×1 matrix.
pub fn col(v: &CVec) -> CMat {
    CMat::from_column_slice(v.len(), 1, v.as_slice())
}

/// `a b*` for column vectors.
pub fn outer(a: &CVec, b: &CVec) -> CMat {
    a * b.adjoint()
}

/// `x† = x*/‖x‖²` as a 1×n row; the zero vector maps to the zero row.
pub fn vdag(x: &CVec) -> CMat {
    let n2 = x.norm_squared();
    if n2 == 0.0 {
        return CMat::zeros(1, x.len());
    }
    CMat::from_fn(1, x.len(), |_, k| x[k].conj() / n2)
}

/// `x*y` (conjugate-linear in the first argument).
pub fn dot(x: &CVec, y: &CVec) -> Complex64 {
    x.dotc(y)
}

/// `x^T y` (bilinear).
pub fn dot_t(x: &CVec, y: &CVec) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}

pub fn conj_vec(x: &CVec) -> CVec {
    x.map(|z| z.conj())
}

/// Singular triplets of `a` with `σ > 0`, sorted descending.
///
/// Computed from the Hermitian eigendecomposition of `[[0, A], [A*, 0]]`,
/// whose positive eigenvalues are the singular values with eigenvectors
/// `[u; v]/√2`. Also returns the largest singular value.
fn positive_svd(a: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (n, m) = a.shape();
    let mut jw = CMat::zeros(n + m, n + m);
    jw.view_mut((0, n), (n, m)).copy_from(a);
    jw.view_mut((n, 0), (m, n)).copy_from(&a.adjoint());
    let (vals, vecs) = hermitian_eigen(&jw);
    let mut idx: Vec<usize> = (0..n + m).filter(|&k| vals[k] > 0.0).collect();
    idx.reverse();
    // at most min(n, m) singular values; the rest are rounding noise from the zero eigenspace
    idx.truncate(n.min(m));
    let r2 = std::f64::consts::SQRT_2;
    let u = CMat::from_fn(n, idx.len(), |i, k| vecs[(i, idx[k])] * r2);
    let v = CMat::from_fn(m, idx.len(), |i, k| vecs[(n + i, idx[k])] * r2);
    let s = idx.iter().map(|&k| vals[k]).collect();
    (u, s, v)
}

/// Retained singular triplets (`σ > rank_tol·σ_max`): `(U1, Σ1, V1)`.
pub fn thin_svd(a: &CMat, cfg: &ToleranceConfig) -> (CMat, Vec<f64>, CMat) {
    let (n, m) = a.shape();
    if n == 0 || m == 0 {
        return (CMat::zeros(n, 0), Vec::new(), CMat::zeros(m, 0));
    }
    let (u, s, v) = positive_svd(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let r = if smax == 0.0 {
        0
    } else {
        s.iter().filter(|&&x| x > cfg.rank_tol * smax).count()
    };
    (u.columns(0, r).into_owned(), s[..r].to_vec(), v.columns(0, r).into_owned())
}

/// Moore-Penrose pseudoinverse via SVD with relative cutoff `rank_tol·σ_max`.
pub fn pinv(a: &CMat, cfg: &ToleranceConfig) -> CMat {
    let (u, s, v) = thin_svd(a, cfg);
    let mut vs = v;
    for (k, &sk) in s.iter().enumerate() {
        vs.column_mut(k).scale_mut(1.0 / sk);
    }
    vs * u.adjoint()
}

/// Numerical rank with the same cutoff as [`pinv`].
pub fn rank(a: &CMat, cfg: &ToleranceConfig) -> usize {
    thin_svd(a, cfg).1.len()
}

/// `𝒫_x = I − x x†`, the orthogonal projector onto range(x)^⊥.
pub fn null_projector(x: &CMat, cfg: &ToleranceConfig) -> CMat {
    let n = x.nrows();
    CMat::identity(n, n) - x * pinv(x, cfg)
}

/// Projector `I − x x†` for a single vector.
pub fn null_projector_vec(x: &CVec) -> CMat {
    let n = x.len();
    CMat::identity(n, n) - col(x) * vdag(x)
}

pub fn herm_part(a: &CMat) -> CMat {
    (a + a.adjoint()).map(|z| z * 0.5)
}

pub fn skew_part(a: &CMat) -> CMat {
    (a - a.adjoint()).map(|z| z * 0.5)
}

pub fn sym_part(a: &CMat) -> CMat {
    (a + a.transpose()).map(|z| z * 0.5)
}

pub fn skew_sym_part(a: &CMat) -> CMat {
    (a - a.transpose()).map(|z| z * 0.5)
}

/// Hermitian and skew-Hermitian parts `(A_H, A_S)` with `A = A_H + A_S`.
pub fn herm_skew_parts(a: &CMat) -> Result<(CMat, CMat)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "herm_skew_parts needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok((herm_part(a), skew_part(a)))
}

fn to_faer(a: &CMat) -> faer::Mat<c64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        let v = a[(i, j)];
        c64::new(v.re, v.im)
    })
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut v = to_faer(&herm_part(a)).selfadjoint_eigenvalues(faer::Side::Lower);
    v.sort_by(f64::total_cmp);
    v
}

/// Eigen-decomposition of the Hermitian part: (ascending eigenvalues, eigenvectors as columns).
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = to_faer(&herm_part(a)).selfadjoint_eigendecomposition(faer::Side::Lower);
    let (s, u) = (eig.s().column_vector(), eig.u());
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| s.read(i).re.total_cmp(&s.read(j).re));
    let vals = idx.iter().map(|&i| s.read(i).re).collect();
    let vecs = CMat::from_fn(n, n, |r, k| {
        let v = u.read(r, idx[k]);
        c(v.re, v.im)
    });
    (vals, vecs)
}

pub fn min_eigenvalue(a: &CMat) -> f64 {
    hermitian_eigenvalues(a).first().copied().unwrap_or(0.0)
}

/// Eigenvalues of a general square matrix, in no particular order.
pub fn eigenvalues(a: &CMat) -> Vec<Complex64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    to_faer(a).complex_eigenvalues().into_iter().map(|v| c(v.re, v.im)).collect()
}

/// Projection onto the PSD cone (eigenvalue clipping of the Hermitian part).
pub fn clip_psd(a: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(a);
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&v| c(v.max(0.0), 0.0)),
    ));
    herm_part(&(&vecs * d * vecs.adjoint()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsdVerdict {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

impl PsdVerdict {
    pub fn is_psd(self) -> bool {
        !matches!(self, PsdVerdict::Indefinite)
    }
}

/// Deviation from Hermitian, relative to the matrix norm.
pub fn hermitian_deviation(a: &CMat) -> f64 {
    let nrm = a.norm();
    if nrm == 0.0 {
        return 0.0;
    }
    (a - a.adjoint()).norm() / nrm
}

/// Classify a Hermitian matrix by its smallest eigenvalue against `±psd_tol·‖A‖_F`.
pub fn is_psd(a: &CMat, cfg: &ToleranceConfig) -> Result<PsdVerdict> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("is_psd needs a square matrix".into()));
    }
    if hermitian_deviation(a) > cfg.residual_tol {
        return Err(Error::Structural(format!(
            "matrix is not Hermitian (relative deviation {:.3e})",
            hermitian_deviation(a)
        )));
    }
    let thr = cfg.psd_tol * a.norm();
    let lmin = min_eigenvalue(a);
    Ok(if lmin > thr {
        PsdVerdict::PositiveDefinite
    } else if lmin >= -thr {
        PsdVerdict::PositiveSemidefinite
    } else {
        PsdVerdict::Indefinite
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPsdReport {
    pub b_psd: bool,
    pub kernel_inclusion: bool,
    pub schur_complement_psd: bool,
    pub overall: bool,
}

/// Block test for `R = [[B, C*], [C, D]] ⪰ 0`: `B ⪰ 0`, `ker B ⊆ ker C`,
/// and `D − C B† C* ⪰ 0`.
pub fn block_psd_check(b: &CMat, cm: &CMat, d: &CMat, cfg: &ToleranceConfig) -> Result<BlockPsdReport> {
    if !b.is_square() || !d.is_square() || cm.nrows() != d.nrows() || cm.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "blocks B {}x{}, C {}x{}, D {}x{} do not form a Hermitian partition",
            b.nrows(),
            b.ncols(),
            cm.nrows(),
            cm.ncols(),
            d.nrows(),
            d.ncols()
        )));
    }
    let scale = b.norm() + cm.norm() + d.norm();
    let thr = cfg.psd_tol * scale;
    let b_psd = min_eigenvalue(b) >= -thr;
    let bp = pinv(b, cfg);
    let s = b.nrows();
    let ker = cm * (CMat::identity(s, s) - &bp * b);
    // near-kernel directions of a PSD B leak into C at the square root of the cutoff
    let kernel_inclusion = ker.norm() <= cfg.rank_tol.sqrt() * scale.max(f64::MIN_POSITIVE);
    let schur = d - cm * &bp * cm.adjoint();
    let schur_complement_psd = min_eigenvalue(&schur) >= -thr;
    Ok(BlockPsdReport {
        b_psd,
        kernel_inclusion,
        schur_complement_psd,
        overall: b_psd && kernel_inclusion && schur_complement_psd,
    })
}

/// SVD-based range split `X = U1 Σ1 V1*` with `U2` completing `U1` to a unitary.
#[derive(Debug, Clone)]
pub struct SvdSplit {
    pub u1: CMat,
    pub u2: CMat,
    pub sigma1: Vec<f64>,
    pub v1: CMat,
    pub rank: usize,
}

pub fn svd_split(x: &CMat, cfg: &ToleranceConfig) -> SvdSplit {
    let n = x.nrows();
    let (u1, sigma1, v1) = thin_svd(x, cfg);
    let r = sigma1.len();
    let comp = CMat::identity(n, n) - &u1 * u1.adjoint();
    let (vals, vecs) = hermitian_eigen(&comp);
    let keep: Vec<usize> = (0..n).filter(|&k| vals[k] > 0.5).collect();
    let u2 = CMat::from_fn(n, keep.len(), |i, k| vecs[(i, keep[k])]);
    SvdSplit {
        u1,
        u2,
        sigma1,
        v1,
        rank: r,
    }
}

/// `‖x − α z‖ ≤ tol·‖x‖` with `α = z*x/‖z‖²`; returns α when colinear.
/// A zero `x` is colinear with α = 0.
pub fn colinear_factor(x: &CVec, z: &CVec, tol: f64) -> Option<Complex64> {
    let xn = x.norm();
    if xn == 0.0 {
        return Some(ZERO);
    }
    let zn2 = z.norm_squared();
    if zn2 == 0.0 {
        return None;
    }
    let alpha = dot(z, x) / zn2;
    let r = (x - z * alpha).norm();
    if r <= tol * xn {
        Some(alpha)
    } else {
        None
    }
}
