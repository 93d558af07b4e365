//! Numerical references that do not use any closed-form minimizer.
//!
//! Every problem is rewritten over an orthonormal real basis of its
//! structured unknowns, so the Frobenius norm becomes the Euclidean norm of
//! the coordinate vector and the interpolation constraints become a real
//! linear system `At = b`. Linear families are then solved exactly (minimum
//! norm point of the affine set). Cone families add a projection and are
//! solved by ADMM, which returns a feasible point and hence an upper bound.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dsm::{DsmProblem, Type1Problem};
use crate::linalg::{c, clip_psd, herm_part, min_eigenvalue, pinv, skew_part, CMat, CVec, ToleranceConfig};
use crate::maps::{structure_deviation, StructureFamily};
use crate::pencil::{BlockSelection, EigenPair, PHPencil, Variant};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleBudget {
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_iterations: 50_000,
            step_tolerance: 1e-12,
            restarts: 3,
            seed: 0,
        }
    }
}

/// A structured interpolation problem in one of the shapes the solvers cover.
#[derive(Debug, Clone)]
pub enum OracleProblem {
    /// `Δx = y`, `Δ` in `family`.
    Map { family: StructureFamily, x: CVec, y: CVec },
    /// `Δx = y`, `Δ*z = w`, `Δ` unstructured.
    TwoSided { x: CVec, y: CVec, z: CVec, w: CVec },
    /// `[Δ1 Δ2]x = y`, `[Δ1 Δ2]*z = w`, `Δ1` in `family`.
    Dsm { family: StructureFamily, problem: DsmProblem },
    /// `ΔX = Y`, `Δ*Z = W`, `Δ` (anti-)dissipative.
    Type1 { family: StructureFamily, problem: Type1Problem },
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub delta: CMat,
    pub norm: f64,
    /// `‖At − b‖` at the returned point.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cone {
    Free,
    Psd,
    Nsd,
    Dissipative,
    AntiDissipative,
}

impl Cone {
    fn of(family: StructureFamily) -> Self {
        match family {
            StructureFamily::Psd => Cone::Psd,
            StructureFamily::Nsd => Cone::Nsd,
            StructureFamily::Dissipative => Cone::Dissipative,
            StructureFamily::AntiDissipative => Cone::AntiDissipative,
            _ => Cone::Free,
        }
    }

    fn project(self, m: &CMat) -> CMat {
        match self {
            Cone::Free => m.clone(),
            Cone::Psd => clip_psd(&herm_part(m)),
            Cone::Nsd => -clip_psd(&-herm_part(m)),
            Cone::Dissipative => skew_part(m) + clip_psd(&herm_part(m)),
            Cone::AntiDissipative => skew_part(m) - clip_psd(&-herm_part(m)),
        }
    }
}

fn unit(rows: usize, cols: usize, entries: &[(usize, usize, Complex64)]) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    for &(i, j, v) in entries {
        m[(i, j)] += v;
    }
    m
}

/// Orthonormal (in `Re tr(A*B)`) real basis of the family on `rows × cols`.
fn family_basis(family: StructureFamily, rows: usize, cols: usize) -> Result<Vec<CMat>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let one = c(1.0, 0.0);
    let im = c(0.0, 1.0);
    let square = || {
        if rows == cols {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("{family} needs a square block, got {rows}×{cols}")))
        }
    };
    let mut out = Vec::new();
    match family {
        StructureFamily::Unstructured | StructureFamily::Dissipative | StructureFamily::AntiDissipative => {
            for j in 0..cols {
                for i in 0..rows {
                    out.push(unit(rows, cols, &[(i, j, one)]));
                    out.push(unit(rows, cols, &[(i, j, im)]));
                }
            }
        }
        StructureFamily::Hermitian | StructureFamily::Psd | StructureFamily::Nsd | StructureFamily::SkewHermitian => {
            square()?;
            let k = if family == StructureFamily::SkewHermitian { im } else { one };
            for i in 0..rows {
                out.push(unit(rows, rows, &[(i, i, k)]));
                for j in i + 1..rows {
                    out.push(unit(rows, rows, &[(i, j, k * s), (j, i, k * s)]));
                    out.push(unit(rows, rows, &[(i, j, k * im * s), (j, i, -k * im * s)]));
                }
            }
        }
        StructureFamily::Symmetric => {
            square()?;
            for i in 0..rows {
                for z in [one, im] {
                    out.push(unit(rows, rows, &[(i, i, z)]));
                    for j in i + 1..rows {
                        out.push(unit(rows, rows, &[(i, j, z * s), (j, i, z * s)]));
                    }
                }
            }
        }
        StructureFamily::SkewSymmetric => {
            square()?;
            for i in 0..rows {
                for j in i + 1..rows {
                    for z in [one, im] {
                        out.push(unit(rows, rows, &[(i, j, z * s), (j, i, -z * s)]));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Unknowns as a tuple of blocks, each with an orthonormal basis and a cone.
struct Space {
    shapes: Vec<(usize, usize)>,
    basis: Vec<(usize, CMat)>,
    cones: Vec<Cone>,
}

impl Space {
    fn new() -> Self {
        Self {
            shapes: Vec::new(),
            basis: Vec::new(),
            cones: Vec::new(),
        }
    }

    fn add_block(&mut self, family: StructureFamily, rows: usize, cols: usize, cone: Cone) -> Result<()> {
        let k = self.shapes.len();
        self.shapes.push((rows, cols));
        self.cones.push(cone);
        self.basis.extend(family_basis(family, rows, cols)?.into_iter().map(|b| (k, b)));
        Ok(())
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn assemble(&self, t: &DVector<f64>) -> Vec<CMat> {
        let mut out: Vec<CMat> = self.shapes.iter().map(|&(r, c)| CMat::zeros(r, c)).collect();
        for (ti, (k, b)) in t.iter().zip(&self.basis) {
            if *ti != 0.0 {
                out[*k] += b * c(*ti, 0.0);
            }
        }
        out
    }

    fn coords(&self, blocks: &[CMat]) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.basis.iter().map(|(k, b)| b.zip_fold(&blocks[*k], 0.0, |acc, p, q| acc + (p.conj() * q).re)),
        )
    }

    fn project_cone(&self, t: &DVector<f64>) -> DVector<f64> {
        if self.cones.iter().all(|c| *c == Cone::Free) {
            return t.clone();
        }
        let blocks = self.assemble(t);
        let projected: Vec<CMat> = blocks.iter().zip(&self.cones).map(|(b, cone)| cone.project(b)).collect();
        self.coords(&projected)
    }

    fn has_cone(&self) -> bool {
        self.cones.iter().any(|c| *c != Cone::Free)
    }
}

fn realify(v: &CVec) -> DVector<f64> {
    let n = v.len();
    DVector::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

/// `At = b` together with a minimum-norm solver for it.
struct Affine {
    a: DMatrix<f64>,
    b: DVector<f64>,
    /// `A⁺`, cut off at `1e-10·σ_max`.
    a_pinv: DMatrix<f64>,
}

impl Affine {
    fn build(space: &Space, rhs: &CVec, op: impl Fn(&[CMat]) -> CVec) -> Self {
        let b = realify(rhs);
        let mut a = DMatrix::zeros(b.len(), space.dim());
        for (i, (k, basis)) in space.basis.iter().enumerate() {
            let mut blocks: Vec<CMat> = space.shapes.iter().map(|&(r, c)| CMat::zeros(r, c)).collect();
            blocks[*k] = basis.clone();
            a.set_column(i, &realify(&op(&blocks)));
        }
        // the normal equations would square the conditioning of A
        let cut = ToleranceConfig {
            rank_tol: 1e-10,
            ..ToleranceConfig::default()
        };
        let a_pinv = pinv(&a.map(|v| c(v, 0.0)), &cut).map(|v| v.re);
        Self { a, b, a_pinv }
    }

    /// Orthogonal projection onto `{t : At = b}`, with two refinement sweeps.
    fn project(&self, p: &DVector<f64>) -> DVector<f64> {
        let mut t = p.clone();
        for _ in 0..3 {
            let r = &self.a * &t - &self.b;
            t -= &self.a_pinv * r;
        }
        t
    }

    fn residual(&self, t: &DVector<f64>) -> f64 {
        (&self.a * t - &self.b).norm()
    }

    fn consistent(&self, t: &DVector<f64>) -> bool {
        self.residual(t) <= 1e-8 * (self.b.norm() + self.a.norm() * t.norm()).max(f64::MIN_POSITIVE)
    }
}

struct Setup {
    space: Space,
    affine: Affine,
    /// Flattens the block tuple into the reported matrix.
    join: fn(&[CMat]) -> CMat,
}

fn single(blocks: &[CMat]) -> CMat {
    blocks[0].clone()
}

fn side_by_side(blocks: &[CMat]) -> CMat {
    let (n, a) = blocks[0].shape();
    let b = blocks[1].ncols();
    let mut out = CMat::zeros(n, a + b);
    out.view_mut((0, 0), (n, a)).copy_from(&blocks[0]);
    out.view_mut((0, a), (n, b)).copy_from(&blocks[1]);
    out
}

fn stack_vecs(parts: &[CVec]) -> CVec {
    let len = parts.iter().map(|p| p.len()).sum();
    let mut out = CVec::zeros(len);
    let mut at = 0;
    for p in parts {
        out.rows_mut(at, p.len()).copy_from(p);
        at += p.len();
    }
    out
}

fn setup(problem: &OracleProblem) -> Result<Setup> {
    let mut space = Space::new();
    match problem {
        OracleProblem::Map { family, x, y } => {
            if x.len() != y.len() {
                return Err(Error::DimensionMismatch("x and y differ in length".into()));
            }
            let n = x.len();
            space.add_block(*family, n, n, Cone::of(*family))?;
            let x = x.clone();
            let affine = Affine::build(&space, y, move |d| &d[0] * &x);
            Ok(Setup { space, affine, join: single })
        }
        OracleProblem::TwoSided { x, y, z, w } => {
            let (rows, cols) = (y.len(), x.len());
            if z.len() != rows || w.len() != cols {
                return Err(Error::DimensionMismatch("two-sided data do not form a rows × cols map".into()));
            }
            space.add_block(StructureFamily::Unstructured, rows, cols, Cone::Free)?;
            let (x, z) = (x.clone(), z.clone());
            let rhs = stack_vecs(&[y.clone(), w.clone()]);
            let affine = Affine::build(&space, &rhs, move |d| stack_vecs(&[&d[0] * &x, d[0].adjoint() * &z]));
            Ok(Setup { space, affine, join: single })
        }
        OracleProblem::Dsm { family, problem: p } => {
            let (n, m) = (p.x1.len(), p.x2.len());
            space.add_block(*family, n, n, Cone::of(*family))?;
            space.add_block(StructureFamily::Unstructured, n, m, Cone::Free)?;
            let (x1, x2, z) = (p.x1.clone(), p.x2.clone(), p.z.clone());
            let rhs = stack_vecs(&[p.y.clone(), p.w1.clone(), p.w2.clone()]);
            let affine = Affine::build(&space, &rhs, move |d| {
                stack_vecs(&[&d[0] * &x1 + &d[1] * &x2, d[0].adjoint() * &z, d[1].adjoint() * &z])
            });
            Ok(Setup {
                space,
                affine,
                join: side_by_side,
            })
        }
        OracleProblem::Type1 { family, problem: q } => {
            if !matches!(family, StructureFamily::Dissipative | StructureFamily::AntiDissipative) {
                return Err(Error::Structural(format!("Type-1 problems are (anti-)dissipative, not {family}")));
            }
            let n = q.x.nrows();
            space.add_block(*family, n, n, Cone::of(*family))?;
            let (x, z) = (q.x.clone(), q.z.clone());
            let flat = |m: &CMat| CVec::from_column_slice(m.as_slice());
            let rhs = stack_vecs(&[flat(&q.y), flat(&q.w)]);
            let affine = Affine::build(&space, &rhs, move |d| {
                stack_vecs(&[flat(&(&d[0] * &x)), flat(&(d[0].adjoint() * &z))])
            });
            Ok(Setup { space, affine, join: single })
        }
    }
}

fn least_norm_point(s: &Setup) -> Result<DVector<f64>> {
    let t = s.affine.project(&DVector::zeros(s.space.dim()));
    if !s.affine.consistent(&t) {
        return Err(Error::Inconsistent(format!(
            "constraints admit no solution in the structure (residual {:.3e})",
            s.affine.residual(&t)
        )));
    }
    Ok(t)
}

fn finish(s: &Setup, t: &DVector<f64>, iterations: usize, converged: bool) -> OracleResult {
    OracleResult {
        delta: (s.join)(&s.space.assemble(t)),
        norm: t.norm(),
        residual: s.affine.residual(t),
        iterations,
        converged,
    }
}

/// Exact minimum-norm solution for linear families (no cone constraint).
pub fn oracle_least_norm(problem: &OracleProblem) -> Result<OracleResult> {
    let s = setup(problem)?;
    if s.space.has_cone() {
        return Err(Error::Structural(
            "cone-constrained family: use oracle_min_structured".into(),
        ));
    }
    let t = least_norm_point(&s)?;
    Ok(finish(&s, &t, 0, true))
}

/// ADMM on `min ½‖t‖²` over `{At = b} ∩ cone`; the returned point satisfies
/// `At = b` to working precision, and its cone violation is below the
/// step tolerance when `converged`. The penalty is rebalanced every 50
/// steps when the primal and dual residuals drift apart by more than 10×.
fn admm(s: &Setup, budget: &OracleBudget, rho: f64) -> (DVector<f64>, usize, bool) {
    let mut rho = rho;
    let start = s.affine.project(&DVector::zeros(s.space.dim()));
    let mut z = s.space.project_cone(&start);
    let mut u = DVector::zeros(s.space.dim());
    let mut t = start;
    let scale = t.norm().max(1.0);
    for k in 0..budget.max_iterations {
        t = s.affine.project(&((&z - &u) * (rho / (1.0 + rho))));
        let z_next = s.space.project_cone(&(&t + &u));
        u += &t - &z_next;
        let primal = (&t - &z_next).norm();
        let dual = rho * (&z_next - &z).norm();
        z = z_next;
        if primal <= budget.step_tolerance * scale && dual <= budget.step_tolerance * scale {
            return (t, k + 1, true);
        }
        if k % 50 == 49 {
            // u is the scaled dual, so it rescales inversely with rho
            if primal > 10.0 * dual {
                rho *= 2.0;
                u /= 2.0;
            } else if dual > 10.0 * primal {
                rho /= 2.0;
                u *= 2.0;
            }
        }
    }
    (t, budget.max_iterations, false)
}

/// Minimizes `‖Δ‖_F` over the structured solution set.
///
/// Linear families reduce to [`oracle_least_norm`]. Cone families run ADMM
/// from `budget.restarts` penalty parameters drawn from `budget.seed` and
/// return the smallest converged iterate, or the last iterate with
/// `converged = false` if none converged.
pub fn oracle_min_structured(problem: &OracleProblem, budget: &OracleBudget) -> Result<OracleResult> {
    let s = setup(problem)?;
    least_norm_point(&s)?;
    if !s.space.has_cone() {
        return oracle_least_norm(problem);
    }
    best_of_restarts(&s, budget)
}

fn best_of_restarts(s: &Setup, budget: &OracleBudget) -> Result<OracleResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut best: Option<OracleResult> = None;
    for r in 0..budget.restarts.max(1) {
        let rho = if r == 0 { 1.0 } else { 10f64.powf(rng.gen_range(-1.0..1.0)) };
        let (t, it, ok) = admm(s, budget, rho);
        let cand = finish(s, &t, it, ok);
        let better = match &best {
            None => true,
            Some(b) => (cand.converged && !b.converged) || (cand.converged == b.converged && cand.norm < b.norm),
        };
        if better {
            best = Some(cand);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Reference value of the structured eigenpair backward error: minimizes
/// `‖[ΔJ ΔR ΔE ΔB]‖_F` over the selected blocks with `ΔJ* = −ΔJ`,
/// `ΔE* = ΔE`, `ΔR* = ΔR` (`ΔR ⪰ 0` for `Sd`) and `(L − ΔL)(λ)u = 0`.
pub fn oracle_eta(
    p: &PHPencil,
    ep: &EigenPair,
    blocks: BlockSelection,
    variant: Variant,
    budget: &OracleBudget,
) -> Result<OracleResult> {
    let (n, m) = (p.n, p.m);
    if ep.u1.len() != n || ep.u2.len() != n || ep.u3.len() != m {
        return Err(Error::DimensionMismatch("eigenvector does not match the pencil".into()));
    }
    let mut space = Space::new();
    let selected = [
        (blocks.j, StructureFamily::SkewHermitian, n, Cone::Free),
        (
            blocks.r,
            StructureFamily::Hermitian,
            n,
            if variant == Variant::Sd { Cone::Psd } else { Cone::Free },
        ),
        (blocks.e, StructureFamily::Hermitian, n, Cone::Free),
        (blocks.b, StructureFamily::Unstructured, m, Cone::Free),
    ];
    // order of blocks inside `space`, by J, R, E, B slot
    let mut slot = [None; 4];
    for (k, (on, family, cols, cone)) in selected.iter().enumerate() {
        if *on {
            slot[k] = Some(space.shapes.len());
            space.add_block(*family, n, *cols, *cone)?;
        }
    }
    let lambda = ep.lambda;
    let u = ep.u();
    let rhs = p.eval(lambda) * &u;
    let dims = (n, m);
    let op = move |d: &[CMat]| {
        let pick = |k: usize, cols: usize| slot[k].map(|i| d[i].clone()).unwrap_or_else(|| CMat::zeros(dims.0, cols));
        let (dj, dr, de, db) = (pick(0, n), pick(1, n), pick(2, n), pick(3, m));
        let size = 2 * n + m;
        let mut dm = CMat::zeros(size, size);
        let mut dn = CMat::zeros(size, size);
        let jr = &dj - &dr;
        dm.view_mut((0, n), (n, n)).copy_from(&jr);
        dm.view_mut((0, 2 * n), (n, m)).copy_from(&db);
        dm.view_mut((n, 0), (n, n)).copy_from(&jr.adjoint());
        dm.view_mut((2 * n, 0), (m, n)).copy_from(&db.adjoint());
        dn.view_mut((0, n), (n, n)).copy_from(&de);
        dn.view_mut((n, 0), (n, n)).copy_from(&-de.adjoint());
        (dm + dn * lambda) * &u
    };
    let affine = Affine::build(&space, &rhs, op);
    let s = Setup {
        space,
        affine,
        join: |blocks: &[CMat]| {
            let rows = blocks[0].nrows();
            let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
            let mut out = CMat::zeros(rows, cols);
            let mut at = 0;
            for b in blocks {
                out.view_mut((0, at), (rows, b.ncols())).copy_from(b);
                at += b.ncols();
            }
            out
        },
    };
    match least_norm_point(&s) {
        Ok(t) if !s.space.has_cone() => Ok(finish(&s, &t, 0, true)),
        Ok(_) => best_of_restarts(&s, budget),
        Err(_) => Err(Error::Infeasible(format!(
            "no {} perturbation of {blocks} makes (λ, u) an eigenpair; the backward error is infinite",
            variant.name()
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub name: String,
    pub value: f64,
    pub scale: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub interpolation: Vec<ResidualEntry>,
    /// Relative deviation of the structured block from its family.
    pub structure_deviation: f64,
    /// Smallest eigenvalue of the matrix the cone constrains, if any.
    pub min_eigenvalue: Option<f64>,
    pub pass: bool,
}

fn entry(name: &str, value: f64, scale: f64, tol: f64) -> ResidualEntry {
    ResidualEntry {
        name: name.into(),
        value,
        scale,
        pass: value <= tol * scale.max(f64::MIN_POSITIVE),
    }
}

/// Residual audit of a candidate `Δ` against the problem data.
pub fn verify_solution(delta: &CMat, problem: &OracleProblem, cfg: &ToleranceConfig) -> Result<VerifyReport> {
    let tol = cfg.residual_tol;
    let dn = delta.norm();
    let (interpolation, family, structured) = match problem {
        OracleProblem::Map { family, x, y } => {
            check_shape(delta, y.len(), x.len())?;
            let r = (delta * x - y).norm();
            (vec![entry("Δx−y", r, dn * x.norm() + y.norm(), tol)], *family, delta.clone())
        }
        OracleProblem::TwoSided { x, y, z, w } => {
            check_shape(delta, y.len(), x.len())?;
            (
                vec![
                    entry("Δx−y", (delta * x - y).norm(), dn * x.norm() + y.norm(), tol),
                    entry("Δ*z−w", (delta.adjoint() * z - w).norm(), dn * z.norm() + w.norm(), tol),
                ],
                StructureFamily::Unstructured,
                delta.clone(),
            )
        }
        OracleProblem::Dsm { family, problem: p } => {
            let (n, m) = (p.x1.len(), p.x2.len());
            check_shape(delta, n, n + m)?;
            let x = stack_vecs(&[p.x1.clone(), p.x2.clone()]);
            let w = stack_vecs(&[p.w1.clone(), p.w2.clone()]);
            (
                vec![
                    entry("Δx−y", (delta * &x - &p.y).norm(), dn * x.norm() + p.y.norm(), tol),
                    entry("Δ*z−w", (delta.adjoint() * &p.z - &w).norm(), dn * p.z.norm() + w.norm(), tol),
                ],
                *family,
                delta.columns(0, n).into_owned(),
            )
        }
        OracleProblem::Type1 { family, problem: q } => {
            check_shape(delta, q.x.nrows(), q.x.nrows())?;
            (
                vec![
                    entry("ΔX−Y", (delta * &q.x - &q.y).norm(), dn * q.x.norm() + q.y.norm(), tol),
                    entry("Δ*Z−W", (delta.adjoint() * &q.z - &q.w).norm(), dn * q.z.norm() + q.w.norm(), tol),
                ],
                *family,
                delta.clone(),
            )
        }
    };
    let (deviation, min_eig) = structure_deviation(family, &structured);
    let structure_ok = deviation <= tol.max(1e-12);
    let cone_ok = min_eig.is_none_or(|v| v >= -cfg.psd_tol * structured.norm().max(1.0));
    let pass = interpolation.iter().all(|e| e.pass) && structure_ok && cone_ok && delta.iter().all(|v| v.is_finite());
    Ok(VerifyReport {
        interpolation,
        structure_deviation: deviation,
        min_eigenvalue: min_eig,
        pass,
    })
}

fn check_shape(delta: &CMat, rows: usize, cols: usize) -> Result<()> {
    if delta.shape() != (rows, cols) {
        return Err(Error::DimensionMismatch(format!(
            "Δ is {}×{}, expected {rows}×{cols}",
            delta.nrows(),
            delta.ncols()
        )));
    }
    Ok(())
}

/// Smallest eigenvalue of `ΔR` in an oracle perturbation for `blocks`
/// (`None` when `R` is not perturbed).
pub fn oracle_eta_delta_r(result: &OracleResult, blocks: BlockSelection, n: usize) -> Option<f64> {
    if !blocks.r {
        return None;
    }
    let offset = if blocks.j { n } else { 0 };
    Some(min_eigenvalue(&result.delta.columns(offset, n).into_owned()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{I, ONE, ZERO};
    use crate::maps::{map_min, map_two_sided};
    use crate::pencil::{eta_sd, gen_eigpair, gen_pencil};

    fn v(xs: &[Complex64]) -> CVec {
        CVec::from_column_slice(xs)
    }

    fn rvec(rng: &mut ChaCha8Rng, n: usize) -> CVec {
        CVec::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn bases_are_orthonormal_and_span_the_family() {
        for family in StructureFamily::ALL {
            let b = family_basis(family, 3, 3).unwrap();
            let expected = match family {
                StructureFamily::Unstructured | StructureFamily::Dissipative | StructureFamily::AntiDissipative => 18,
                StructureFamily::Symmetric => 12,
                StructureFamily::SkewSymmetric => 6,
                _ => 9,
            };
            assert_eq!(b.len(), expected, "{family}");
            for (i, p) in b.iter().enumerate() {
                for (j, q) in b.iter().enumerate() {
                    let ip = p.zip_fold(q, 0.0, |acc, a, b| acc + (a.conj() * b).re);
                    assert!((ip - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
                }
                let (dev, _) = structure_deviation(family, p);
                assert!(dev < 1e-15, "{family}");
            }
        }
    }

    #[test]
    fn trivial_least_norm_cases() {
        let p = OracleProblem::Map {
            family: StructureFamily::Unstructured,
            x: v(&[ONE, ZERO]),
            y: v(&[ZERO, c(2.0, 0.0)]),
        };
        assert!((oracle_least_norm(&p).unwrap().norm - 2.0).abs() < 1e-14);
        let p = OracleProblem::Map {
            family: StructureFamily::Hermitian,
            x: v(&[ONE, ZERO]),
            y: v(&[ONE, ZERO]),
        };
        let r = oracle_least_norm(&p).unwrap();
        assert!((r.norm - 1.0).abs() < 1e-14);
        assert!((r.delta[(0, 0)] - ONE).norm() < 1e-14 && r.delta[(1, 1)].norm() < 1e-14);
    }

    #[test]
    fn agrees_with_closed_forms_on_linear_families() {
        let cfg = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for family in [
            StructureFamily::Hermitian,
            StructureFamily::SkewHermitian,
            StructureFamily::Symmetric,
            StructureFamily::SkewSymmetric,
        ] {
            for _ in 0..10 {
                let n = rng.gen_range(2..5);
                let x = rvec(&mut rng, n);
                let mut y = rvec(&mut rng, n);
                // consistency: Hermitian needs real x*y, skew needs imaginary, skew-symmetric needs xᵀy = 0
                match family {
                    StructureFamily::Hermitian => y -= &x * c(0.0, crate::linalg::dot(&x, &y).im / x.norm_squared()),
                    StructureFamily::SkewHermitian => {
                        y -= &x * c(crate::linalg::dot(&x, &y).re / x.norm_squared(), 0.0)
                    }
                    StructureFamily::SkewSymmetric => {
                        let xc = crate::linalg::conj_vec(&x);
                        y -= &xc * (crate::linalg::dot_t(&x, &y) / x.norm_squared());
                    }
                    _ => {}
                }
                let closed = map_min(family, &x, &y, &cfg).unwrap();
                let o = oracle_least_norm(&OracleProblem::Map { family, x, y }).unwrap();
                assert!((o.norm - closed.min_norm).abs() <= 1e-8 * closed.min_norm, "{family}");
            }
        }
        for _ in 0..10 {
            let x = rvec(&mut rng, 3);
            let z = rvec(&mut rng, 2);
            let truth = CMat::from_fn(2, 3, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let y = &truth * &x;
            let w = truth.adjoint() * &z;
            let closed = map_two_sided(&x, &y, &z, &w, &cfg).unwrap();
            let o = oracle_least_norm(&OracleProblem::TwoSided { x, y, z, w }).unwrap();
            assert!((o.norm - closed.min_norm).abs() <= 1e-8 * closed.min_norm);
        }
    }

    #[test]
    fn inconsistent_constraints_are_reported() {
        let p = OracleProblem::Map {
            family: StructureFamily::Hermitian,
            x: v(&[ONE]),
            y: v(&[I]),
        };
        assert!(matches!(oracle_least_norm(&p), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn cone_examples() {
        let budget = OracleBudget::default();
        let e1 = v(&[ONE]);
        let q = Type1Problem::from_vectors(&e1, &e1, &e1, &e1).unwrap();
        let r = oracle_min_structured(
            &OracleProblem::Type1 {
                family: StructureFamily::Dissipative,
                problem: q,
            },
            &budget,
        )
        .unwrap();
        assert!(r.converged && (r.norm - 1.0).abs() < 1e-6);
        // x = e1, y = (1, 1): the minimal dissipative map is below √3
        let r = oracle_min_structured(
            &OracleProblem::Map {
                family: StructureFamily::Dissipative,
                x: v(&[ONE, ZERO]),
                y: v(&[ONE, ONE]),
            },
            &budget,
        )
        .unwrap();
        assert!(r.converged);
        let exact = crate::maps::dissipative_min_norm_sq(&v(&[ONE, ZERO]), &v(&[ONE, ONE])).sqrt();
        assert!((r.norm - exact).abs() < 1e-6, "{} vs {}", r.norm, exact);
    }

    #[test]
    fn eta_reference_values() {
        let budget = OracleBudget::default();
        let cfg = ToleranceConfig::default();
        let p = crate::pencil::scalar_pencil(I, 1.0, 1.0, ONE, 1.0);
        let ep = EigenPair::new(I, v(&[ONE]), v(&[ONE]), v(&[ZERO]), &cfg).unwrap();
        let r = oracle_eta(&p, &ep, BlockSelection::JREB, Variant::Sd, &budget).unwrap();
        assert!(r.norm >= 3.5f64.sqrt() - 1e-4 && r.norm <= 6f64.sqrt() + 1e-4, "{}", r.norm);
        let p0 = crate::pencil::scalar_pencil(I, 1.0, 1.0, ZERO, 1.0);
        let r = oracle_eta(&p0, &ep, BlockSelection::JR, Variant::Sd, &budget).unwrap();
        assert!((r.norm - 5f64.sqrt()).abs() < 1e-4, "{}", r.norm);
        let ep3 = EigenPair::new(I, v(&[ONE]), v(&[ONE]), v(&[ONE]), &cfg).unwrap();
        assert!(matches!(
            oracle_eta(&p, &ep3, BlockSelection::JREB, Variant::Sd, &budget),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn eta_sandwich_on_random_pencils() {
        let cfg = ToleranceConfig::default();
        let budget = OracleBudget::default();
        for seed in 0..5 {
            let p = gen_pencil(2, 1, seed);
            let ep = gen_eigpair(&p, seed, BlockSelection::JREB).unwrap();
            let b = eta_sd(&p, &ep, BlockSelection::JREB, &cfg).unwrap();
            let o = oracle_eta(&p, &ep, BlockSelection::JREB, Variant::Sd, &budget).unwrap();
            assert!(o.norm >= b.eta_lower - 1e-6 && o.norm <= b.eta_upper + 1e-6, "seed {seed}");
            assert!(oracle_eta_delta_r(&o, BlockSelection::JREB, 2).unwrap() > -1e-8);
        }
    }

    #[test]
    fn verify_reports_perturbation_size() {
        let cfg = ToleranceConfig::default();
        let x = v(&[ONE, ZERO]);
        let y = v(&[c(2.0, 0.0), ONE]);
        let problem = OracleProblem::Map {
            family: StructureFamily::Hermitian,
            x: x.clone(),
            y: y.clone(),
        };
        let sol = map_min(StructureFamily::Hermitian, &x, &y, &cfg).unwrap();
        assert!(verify_solution(&sol.minimizer, &problem, &cfg).unwrap().pass);
        let bumped = &sol.minimizer + CMat::from_element(2, 2, c(1e-3, 0.0));
        let rep = verify_solution(&bumped, &problem, &cfg).unwrap();
        assert!(!rep.pass);
        assert!((rep.interpolation[0].value - 2f64.sqrt() * 1e-3).abs() < 1e-12);
    }
}
