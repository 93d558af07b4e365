//! Eigenpair backward errors under symmetry (`S`) and semidefinite (`Sd`)
//! structure, for every perturbed block combination with a closed form.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{mapping_data, EigenPair, PHPencil};
use crate::dsm::dsdm_type1_vec_anti;
use crate::linalg::{
    col, colinear_factor, dot, herm_part, hermitian_eigenvalues, pinv, rank, skew_part, vdag, CMat, CVec,
    ToleranceConfig,
};
use crate::{Error, Result};

/// Perturbed blocks of the pencil, stored in the canonical order `J, R, E, B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockSelection {
    pub j: bool,
    pub r: bool,
    pub e: bool,
    pub b: bool,
}

const fn sel(j: bool, r: bool, e: bool, b: bool) -> BlockSelection {
    BlockSelection { j, r, e, b }
}

impl BlockSelection {
    pub const JR: Self = sel(true, true, false, false);
    pub const JE: Self = sel(true, false, true, false);
    pub const JB: Self = sel(true, false, false, true);
    pub const RE: Self = sel(false, true, true, false);
    pub const RB: Self = sel(false, true, false, true);
    pub const EB: Self = sel(false, false, true, true);
    pub const JRE: Self = sel(true, true, true, false);
    pub const JRB: Self = sel(true, true, false, true);
    pub const REB: Self = sel(false, true, true, true);
    pub const JEB: Self = sel(true, false, true, true);
    pub const JREB: Self = sel(true, true, true, true);

    /// Every combination of two or more blocks.
    pub const ALL: [Self; 11] = [
        Self::JR,
        Self::JE,
        Self::JB,
        Self::RE,
        Self::RB,
        Self::EB,
        Self::JRE,
        Self::JRB,
        Self::REB,
        Self::JEB,
        Self::JREB,
    ];

    pub fn name(self) -> String {
        [(self.j, 'J'), (self.r, 'R'), (self.e, 'E'), (self.b, 'B')]
            .iter()
            .filter(|(on, _)| *on)
            .map(|(_, ch)| *ch)
            .collect()
    }

    fn count(self) -> usize {
        [self.j, self.r, self.e, self.b].iter().filter(|&&x| x).count()
    }

    fn listed(self) -> String {
        self.name().chars().map(String::from).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for BlockSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for BlockSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = sel(false, false, false, false);
        for ch in s.trim().chars().filter(|ch| !matches!(ch, ',' | ' ')) {
            let slot = match ch.to_ascii_uppercase() {
                'J' => &mut out.j,
                'R' => &mut out.r,
                'E' => &mut out.e,
                'B' => &mut out.b,
                _ => return Err(Error::Parse(format!("unknown block '{ch}' in \"{s}\""))),
            };
            if *slot {
                return Err(Error::Parse(format!("block '{ch}' repeated in \"{s}\"")));
            }
            *slot = true;
        }
        if out.count() < 2 {
            return Err(Error::Parse(format!("\"{s}\": select at least two of J, R, E, B")));
        }
        Ok(out)
    }
}

/// `S`: symmetry-preserving (`ΔJ* = −ΔJ`, `ΔR* = ΔR`, `ΔE* = ΔE`);
/// `Sd`: additionally `ΔR ⪰ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    S,
    Sd,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::S => "s",
            Variant::Sd => "sd",
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s" => Ok(Variant::S),
            "sd" => Ok(Variant::Sd),
            other => Err(Error::Parse(format!("unknown variant \"{other}\" (expected s or sd)"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// Decides whether the backward error is finite.
    Finiteness,
    /// Needed by the closed form.
    Hypothesis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub kind: ConditionKind,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct BackwardErrorBounds {
    pub blocks: BlockSelection,
    pub variant: Variant,
    pub lambda: Complex64,
    pub finite: bool,
    pub eta_lower: f64,
    pub eta_upper: f64,
    pub exact: bool,
    /// Block norm of the perturbation built by [`reconstruct_perturbation`].
    /// Equals `eta_upper` except for `JREB`, where the optimal skew split
    /// lands strictly between the bounds.
    pub attained: f64,
    pub h1: CMat,
    pub h2: CMat,
    /// `u2 = αu1`.
    pub alpha: Option<Complex64>,
    pub ytil: CVec,
    pub w1: CVec,
    pub conditions: Vec<Condition>,
}

impl BackwardErrorBounds {
    /// `name=yes|no` pairs separated by `;`.
    pub fn conditions_report(&self) -> String {
        self.conditions
            .iter()
            .map(|c| format!("{}={}", c.name, if c.holds { "yes" } else { "no" }))
            .collect::<Vec<_>>()
            .join(";")
    }
}

struct Data {
    lambda: Complex64,
    ytil: CVec,
    w1: CVec,
    n: usize,
    m: usize,
}

fn data(p: &PHPencil, ep: &EigenPair) -> Result<Data> {
    let (_, _, _, w) = mapping_data(p, ep)?;
    if ep.lambda.norm() == 0.0 {
        return Err(Error::DegenerateInput("λ must be nonzero".into()));
    }
    let ytil = (&p.j - &p.r + &p.e * ep.lambda) * &ep.u2;
    Ok(Data {
        lambda: ep.lambda,
        ytil,
        w1: w.rows(0, p.n).into_owned(),
        n: p.n,
        m: p.m,
    })
}

fn small(v: f64, scale: f64, tol: f64) -> bool {
    v <= tol * scale
}

fn cond(name: &'static str, kind: ConditionKind, holds: bool) -> Condition {
    Condition { name, kind, holds }
}

fn u3_zero(ep: &EigenPair, cfg: &ToleranceConfig) -> Condition {
    cond(
        "u3=0",
        ConditionKind::Finiteness,
        small(ep.u3.norm(), ep.u().norm(), cfg.residual_tol),
    )
}

fn colinearity(ep: &EigenPair, cfg: &ToleranceConfig) -> (Condition, Option<Complex64>) {
    let alpha = if ep.u1.norm() == 0.0 {
        None
    } else {
        colinear_factor(&ep.u2, &ep.u1, cfg.colinearity_tol).filter(|a| a.norm() > 0.0)
    };
    (cond("u2=alpha*u1", ConditionKind::Hypothesis, alpha.is_some()), alpha)
}

fn infinite(blocks: BlockSelection, variant: Variant, d: Data, alpha: Option<Complex64>, conditions: Vec<Condition>) -> BackwardErrorBounds {
    BackwardErrorBounds {
        blocks,
        variant,
        lambda: d.lambda,
        finite: false,
        eta_lower: f64::INFINITY,
        eta_upper: f64::INFINITY,
        exact: false,
        attained: f64::INFINITY,
        h1: CMat::zeros(d.n, d.n),
        h2: CMat::zeros(d.n, d.m),
        alpha,
        ytil: d.ytil,
        w1: d.w1,
        conditions,
    }
}

fn require(conditions: &[Condition]) -> Result<()> {
    match conditions.iter().find(|c| c.kind == ConditionKind::Hypothesis && !c.holds) {
        Some(c) => Err(Error::HypothesisViolated(c.name.into())),
        None => Ok(()),
    }
}

fn not_implemented(variant: Variant, blocks: BlockSelection) -> Error {
    let tag = if variant == Variant::S { "S" } else { "Sd" };
    Error::NotImplemented(format!("η^{tag}({}) has no closed form here; not implemented", blocks.listed()))
}

/// `u1 u1† B`, the minimal `ΔB` with `ΔB* u1 = B* u1`.
fn h2_of(p: &PHPencil, ep: &EigenPair) -> CMat {
    col(&ep.u1) * vdag(&ep.u1) * &p.b
}

/// Semidefinite-structure-preserving backward error bounds.
///
/// `JR`, `RE`, `JRE`, `JRB`, `REB` and `JREB` go through the anti-dissipative
/// Type-1 mapping, `RB` through the negative semidefinite two-vector mapping.
/// `JB`, `EB` and `JEB` leave `R` untouched and coincide with [`eta_s`].
pub fn eta_sd(p: &PHPencil, ep: &EigenPair, blocks: BlockSelection, cfg: &ToleranceConfig) -> Result<BackwardErrorBounds> {
    if [BlockSelection::JB, BlockSelection::EB, BlockSelection::JEB].contains(&blocks) {
        let mut out = eta_s(p, ep, blocks, cfg)?;
        out.variant = Variant::Sd;
        return Ok(out);
    }
    if blocks == BlockSelection::JE {
        return Err(not_implemented(Variant::Sd, blocks));
    }
    let d = data(p, ep)?;
    if blocks == BlockSelection::RB {
        return rb_sd(p, ep, d, cfg);
    }

    let mut conditions = vec![u3_zero(ep, cfg)];
    if !blocks.b {
        let bu = (p.b.adjoint() * &ep.u1).norm();
        conditions.push(cond(
            "B*u1=0",
            ConditionKind::Finiteness,
            small(bu, p.b.norm() * ep.u1.norm(), cfg.residual_tol),
        ));
    }
    let (colin, alpha) = colinearity(ep, cfg);
    conditions.push(colin);
    let ru2 = (&p.r * &ep.u2).norm();
    conditions.push(cond(
        "Ru2!=0",
        ConditionKind::Hypothesis,
        !small(ru2, p.r.norm() * ep.u2.norm(), cfg.residual_tol) && ru2 > 0.0,
    ));
    if conditions.iter().any(|c| c.kind == ConditionKind::Finiteness && !c.holds) {
        return Ok(infinite(blocks, Variant::Sd, d, alpha, conditions));
    }
    require(&conditions)?;

    let h1 = dsdm_type1_vec_anti(&ep.u2, &d.ytil, &ep.u1, &d.w1, cfg)?.minimizer;
    let h2 = if blocks.b { h2_of(p, ep) } else { CMat::zeros(d.n, d.m) };
    let n1 = h1.norm_squared();
    let nh = herm_part(&h1).norm_squared();
    let ns = skew_part(&h1).norm_squared();
    let n2 = h2.norm_squared();
    let mu2 = d.lambda.norm_sqr();

    let (lower2, upper2, attained2) = if blocks == BlockSelection::JR || blocks == BlockSelection::JRB {
        (n1 + n2, n1 + n2, n1 + n2)
    } else if blocks == BlockSelection::RE || blocks == BlockSelection::REB {
        let up = nh + ns / mu2 + n2;
        (n1 * 1f64.min(1.0 / mu2) + n2, up, up)
    } else if blocks == BlockSelection::JRE {
        let up = nh + ns / (1.0 + mu2);
        (n1 / (1.0 + mu2), up, up)
    } else {
        // JREB
        (n1 / (1.0 + mu2) + n2, n1 + n2, nh + ns / (1.0 + mu2) + n2)
    };
    let exact_combo = blocks == BlockSelection::JR || blocks == BlockSelection::JRB;
    Ok(finish(blocks, Variant::Sd, d, alpha, conditions, h1, h2, lower2, upper2, attained2, exact_combo, cfg))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    blocks: BlockSelection,
    variant: Variant,
    d: Data,
    alpha: Option<Complex64>,
    conditions: Vec<Condition>,
    h1: CMat,
    h2: CMat,
    lower2: f64,
    upper2: f64,
    attained2: f64,
    exact_combo: bool,
    cfg: &ToleranceConfig,
) -> BackwardErrorBounds {
    let (lower, upper) = (lower2.sqrt(), upper2.sqrt());
    let exact = exact_combo || upper - lower <= cfg.residual_tol * upper;
    BackwardErrorBounds {
        blocks,
        variant,
        lambda: d.lambda,
        finite: true,
        eta_lower: if exact { upper } else { lower },
        eta_upper: upper,
        exact,
        attained: attained2.sqrt(),
        h1,
        h2,
        alpha,
        ytil: d.ytil,
        w1: d.w1,
        conditions,
    }
}

fn two_columns(a: &CVec, b: &CVec) -> CMat {
    let mut x = CMat::zeros(a.len(), 2);
    x.set_column(0, a);
    x.set_column(1, b);
    x
}

/// `YX†X = Y`.
fn consistent(x: &CMat, y: &CMat, xp: &CMat, cfg: &ToleranceConfig) -> bool {
    small((y * xp * x - y).norm(), y.norm().max(f64::MIN_POSITIVE), cfg.residual_tol)
}

fn rb_sd(p: &PHPencil, ep: &EigenPair, d: Data, cfg: &ToleranceConfig) -> Result<BackwardErrorBounds> {
    let blocks = BlockSelection::RB;
    let jle = &p.j + &p.e * d.lambda;
    let q = dot(&ep.u1, &(&jle * &ep.u1));
    let ru1 = (&p.r * &ep.u1).norm();
    let mut conditions = vec![
        u3_zero(ep, cfg),
        cond(
            "u1*(J+lambda*E)u1=0",
            ConditionKind::Finiteness,
            small(q.norm(), jle.norm() * ep.u1.norm_squared(), cfg.residual_tol),
        ),
        cond(
            "Ru1!=0",
            ConditionKind::Finiteness,
            ru1 > 0.0 && !small(ru1, p.r.norm() * ep.u1.norm(), cfg.residual_tol),
        ),
    ];
    let (colin, alpha) = colinearity(ep, cfg);
    conditions.push(colin);
    if conditions.iter().any(|c| c.kind == ConditionKind::Finiteness && !c.holds) {
        return Ok(infinite(blocks, Variant::Sd, d, alpha, conditions));
    }
    let x = two_columns(&ep.u2, &ep.u1);
    let y = two_columns(&d.ytil, &d.w1);
    let xp = pinv(&x, cfg);
    conditions.push(cond("YX^+X=Y", ConditionKind::Hypothesis, consistent(&x, &y, &xp, cfg)));
    // rank-aware form of X*Y ≺ 0
    let xy = x.adjoint() * &y;
    let scale = x.norm() * y.norm();
    let herm = small((&xy - xy.adjoint()).norm(), scale, cfg.residual_tol);
    let nsd = hermitian_eigenvalues(&xy).last().copied().unwrap_or(0.0) <= cfg.psd_tol * scale;
    let ranks = rank(&xy, cfg) == rank(&y, cfg);
    conditions.push(cond("X*Y<=0,rank(Y*X)=rank(Y)", ConditionKind::Hypothesis, herm && nsd && ranks));
    require(&conditions)?;

    let yx = y.adjoint() * &x;
    let h1 = herm_part(&(&y * pinv(&yx, cfg) * y.adjoint()));
    let h2 = h2_of(p, ep);
    let total = h1.norm_squared() + h2.norm_squared();
    Ok(finish(blocks, Variant::Sd, d, alpha, conditions, h1, h2, total, total, total, true, cfg))
}

/// Symmetry-structure-preserving backward errors for `JB`, `EB`, `JEB`
/// (skew-Hermitian two-vector mapping) and `RB` (Hermitian).
pub fn eta_s(p: &PHPencil, ep: &EigenPair, blocks: BlockSelection, cfg: &ToleranceConfig) -> Result<BackwardErrorBounds> {
    let skew = [BlockSelection::JB, BlockSelection::EB, BlockSelection::JEB].contains(&blocks);
    if !skew && blocks != BlockSelection::RB {
        return Err(not_implemented(Variant::S, blocks));
    }
    let d = data(p, ep)?;
    let mut conditions = vec![u3_zero(ep, cfg)];
    if skew {
        let ru1 = (&p.r * &ep.u1).norm();
        conditions.push(cond(
            "Ru1=0",
            ConditionKind::Finiteness,
            small(ru1, p.r.norm() * ep.u1.norm(), cfg.residual_tol),
        ));
    } else {
        let jle = &p.j + &p.e * d.lambda;
        let q = dot(&ep.u1, &(&jle * &ep.u1));
        conditions.push(cond(
            "u1*(J+lambda*E)u1=0",
            ConditionKind::Finiteness,
            small(q.norm(), jle.norm() * ep.u1.norm_squared(), cfg.residual_tol),
        ));
    }
    let (colin, alpha) = colinearity(ep, cfg);
    conditions.push(colin);
    if conditions.iter().any(|c| c.kind == ConditionKind::Finiteness && !c.holds) {
        return Ok(infinite(blocks, Variant::S, d, alpha, conditions));
    }

    let x = two_columns(&ep.u2, &ep.u1);
    let y = if skew {
        two_columns(&d.ytil, &-&d.w1)
    } else {
        two_columns(&d.ytil, &d.w1)
    };
    let xp = pinv(&x, cfg);
    conditions.push(cond("YX^+X=Y", ConditionKind::Hypothesis, consistent(&x, &y, &xp, cfg)));
    let yx = y.adjoint() * &x;
    let xy = x.adjoint() * &y;
    let sym_gap = if skew { (&yx + &xy).norm() } else { (&yx - &xy).norm() };
    conditions.push(cond(
        if skew { "Y*X=-X*Y" } else { "Y*X=X*Y" },
        ConditionKind::Hypothesis,
        small(sym_gap, x.norm() * y.norm(), cfg.residual_tol),
    ));
    require(&conditions)?;

    let yxp = &y * &xp;
    let corr = &x * &xp * &yxp;
    let h1 = if skew {
        skew_part(&(&yxp - yxp.adjoint() - corr))
    } else {
        herm_part(&(&yxp + yxp.adjoint() - corr))
    };
    let h2 = h2_of(p, ep);
    let n1 = h1.norm_squared();
    let n2 = h2.norm_squared();
    let mu2 = d.lambda.norm_sqr();
    let total = if blocks == BlockSelection::EB {
        n1 / mu2 + n2
    } else if blocks == BlockSelection::JEB {
        n1 / (1.0 + mu2) + n2
    } else {
        n1 + n2
    };
    Ok(finish(blocks, Variant::S, d, alpha, conditions, h1, h2, total, total, total, true, cfg))
}

/// A structured perturbation `ΔL(z) = ΔM + zΔN` in block form.
#[derive(Debug, Clone)]
pub struct PerturbationBlocks {
    pub dj: CMat,
    pub dr: CMat,
    pub de: CMat,
    pub db: CMat,
    /// `‖[ΔJ ΔR ΔE ΔB]‖_F`.
    pub block_norm: f64,
    /// `‖[ΔM ΔN]‖_F`.
    pub pencil_norm: f64,
    /// `‖(L − ΔL)(λ)u‖`.
    pub residual: f64,
    /// `(‖L(λ)‖_F + ‖ΔL(λ)‖_F)‖u‖`, the scale `residual` is judged against.
    pub scale: f64,
}

impl PerturbationBlocks {
    pub fn delta_m(&self) -> CMat {
        let (n, m) = (self.dj.nrows(), self.db.ncols());
        let mut out = CMat::zeros(2 * n + m, 2 * n + m);
        let jr = &self.dj - &self.dr;
        out.view_mut((0, n), (n, n)).copy_from(&jr);
        out.view_mut((0, 2 * n), (n, m)).copy_from(&self.db);
        out.view_mut((n, 0), (n, n)).copy_from(&jr.adjoint());
        out.view_mut((2 * n, 0), (m, n)).copy_from(&self.db.adjoint());
        out
    }

    pub fn delta_n(&self) -> CMat {
        let (n, m) = (self.dj.nrows(), self.db.ncols());
        let mut out = CMat::zeros(2 * n + m, 2 * n + m);
        out.view_mut((0, n), (n, n)).copy_from(&self.de);
        out.view_mut((n, 0), (n, n)).copy_from(&-self.de.adjoint());
        out
    }
}

/// Splits `H1` into `ΔJ − ΔR + λΔE` and sets `ΔB = H2`, then verifies that
/// `(λ, u)` is an eigenpair of the perturbed pencil.
///
/// `ΔR = −(H1)_H`; the skew part goes to `ΔJ = S/(1+|λ|²)` and
/// `ΔE = λ̄S/(1+|λ|²)` when both are perturbed, which minimizes
/// `‖ΔJ‖² + ‖ΔE‖²` subject to `ΔJ + λΔE = S`.
pub fn reconstruct_perturbation(
    p: &PHPencil,
    ep: &EigenPair,
    blocks: BlockSelection,
    sol: &BackwardErrorBounds,
    cfg: &ToleranceConfig,
) -> Result<PerturbationBlocks> {
    if !sol.finite {
        return Err(Error::DegenerateInput("the backward error is infinite".into()));
    }
    if sol.blocks != blocks {
        return Err(Error::DimensionMismatch(format!(
            "solution is for {}, requested {}",
            sol.blocks, blocks
        )));
    }
    let n = p.n;
    let lambda = ep.lambda;
    let mu2 = lambda.norm_sqr();
    let zero = CMat::zeros(n, n);
    let hh = herm_part(&sol.h1);
    let hs = skew_part(&sol.h1);
    let (mut dj, mut dr, mut de) = (zero.clone(), zero.clone(), zero);
    if blocks.r {
        dr = -&hh;
    }
    let s = if blocks.r { hs } else { sol.h1.clone() };
    match (blocks.j, blocks.e) {
        (true, true) => {
            dj = s.map(|v| v / (1.0 + mu2));
            de = s.map(|v| v * lambda.conj() / (1.0 + mu2));
        }
        (true, false) => dj = s,
        (false, true) => de = s.map(|v| v / lambda),
        (false, false) => {}
    }
    // RB: the whole Hermitian H1 is −ΔR
    if !blocks.j && !blocks.e {
        dr = -herm_part(&sol.h1);
    }
    let db = if blocks.b { sol.h2.clone() } else { CMat::zeros(n, p.m) };
    let block_norm = (dj.norm_squared() + dr.norm_squared() + de.norm_squared() + db.norm_squared()).sqrt();
    let mut out = PerturbationBlocks {
        dj,
        dr,
        de,
        db,
        block_norm,
        pencil_norm: 0.0,
        residual: 0.0,
        scale: 0.0,
    };
    let dm = out.delta_m();
    let dn = out.delta_n();
    out.pencil_norm = (dm.norm_squared() + dn.norm_squared()).sqrt();
    let dl = &dm + &dn * lambda;
    let l = p.eval(lambda);
    let u = ep.u();
    out.residual = ((&l - &dl) * &u).norm();
    out.scale = (l.norm() + dl.norm()) * u.norm();
    if out.residual > cfg.residual_tol * out.scale {
        return Err(Error::Verification(format!(
            "(L − ΔL)(λ)u = {:.3e} exceeds {:.3e}",
            out.residual,
            cfg.residual_tol * out.scale
        )));
    }
    let scale = out.block_norm.max(1.0);
    if (&out.dj + out.dj.adjoint()).norm() > cfg.residual_tol * scale
        || (&out.dr - out.dr.adjoint()).norm() > cfg.residual_tol * scale
        || (&out.de - out.de.adjoint()).norm() > cfg.residual_tol * scale
    {
        return Err(Error::Verification("perturbation blocks lost their symmetry".into()));
    }
    if sol.variant == Variant::Sd {
        let lmin = crate::linalg::min_eigenvalue(&out.dr);
        if lmin < -cfg.psd_tol * scale {
            return Err(Error::Verification(format!("ΔR is not positive semidefinite (λmin = {lmin:.3e})")));
        }
    }
    Ok(out)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, I, ONE, ZERO};
    use crate::pencil::{gen_eigpair, gen_pencil_with, scalar_pencil, PencilOptions};

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn v1(z: Complex64) -> CVec {
        CVec::from_element(1, z)
    }

    fn scalar_pair(lambda: Complex64, u: [Complex64; 3]) -> EigenPair {
        EigenPair::new(lambda, v1(u[0]), v1(u[1]), v1(u[2]), &cfg()).unwrap()
    }

    #[test]
    fn jreb_scalar_example() {
        let p = scalar_pencil(I, 1.0, 1.0, ONE, 1.0);
        let ep = scalar_pair(I, [ONE, ONE, ZERO]);
        let s = eta_sd(&p, &ep, BlockSelection::JREB, &cfg()).unwrap();
        assert!(s.finite && !s.exact);
        assert!((s.h1[(0, 0)] - c(-1.0, 2.0)).norm() < 1e-14);
        assert!((s.h2[(0, 0)] - ONE).norm() < 1e-14);
        assert!((s.eta_lower - 3.5f64.sqrt()).abs() < 1e-12);
        assert!((s.eta_upper - 6f64.sqrt()).abs() < 1e-12);
        let d = reconstruct_perturbation(&p, &ep, BlockSelection::JREB, &s, &cfg()).unwrap();
        assert!((d.dr[(0, 0)] - ONE).norm() < 1e-14);
        assert!(d.residual < 1e-12);
        assert!((d.block_norm - s.attained).abs() < 1e-12);
        assert!(s.attained <= s.eta_upper && s.attained >= s.eta_lower);
    }

    #[test]
    fn jr_scalar_example_is_exact() {
        let p = scalar_pencil(I, 1.0, 1.0, ZERO, 1.0);
        let ep = scalar_pair(I, [ONE, ONE, ZERO]);
        let s = eta_sd(&p, &ep, BlockSelection::JR, &cfg()).unwrap();
        assert!(s.exact);
        assert!((s.eta_upper - 5f64.sqrt()).abs() < 1e-12);
        let d = reconstruct_perturbation(&p, &ep, BlockSelection::JR, &s, &cfg()).unwrap();
        assert_eq!(d.db.norm(), 0.0);
        assert!((d.block_norm - s.eta_upper).abs() < 1e-12);
    }

    #[test]
    fn jb_scalar_example() {
        // with E = 1: ỹ = (i + i)·1 = 2i, w1 = −2i
        let p = scalar_pencil(I, 0.0, 1.0, ONE, 1.0);
        let ep = scalar_pair(I, [ONE, ONE, ZERO]);
        let s = eta_s(&p, &ep, BlockSelection::JB, &cfg()).unwrap();
        assert!((s.ytil[0] - c(0.0, 2.0)).norm() < 1e-14);
        assert!((s.w1[0] - c(0.0, -2.0)).norm() < 1e-14);
        assert!((s.h1[(0, 0)] - c(0.0, 2.0)).norm() < 1e-14);
        assert!((s.eta_upper - 5f64.sqrt()).abs() < 1e-12);
        // E = 0 as literally written: ỹ = i, H1 = i
        let p0 = scalar_pencil(I, 0.0, 0.0, ONE, 1.0);
        let s0 = eta_s(&p0, &ep, BlockSelection::JB, &cfg()).unwrap();
        assert!((s0.eta_upper - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn infinite_cases() {
        let p = scalar_pencil(I, 1.0, 1.0, ONE, 1.0);
        let ep = scalar_pair(I, [ONE, ONE, ONE]);
        let s = eta_sd(&p, &ep, BlockSelection::JREB, &cfg()).unwrap();
        assert!(!s.finite && s.eta_upper.is_infinite());
        let ep = scalar_pair(I, [ONE, ONE, ZERO]);
        let s = eta_s(&p, &ep, BlockSelection::EB, &cfg()).unwrap();
        assert!(!s.finite);
        let s = eta_s(&p, &ep, BlockSelection::RB, &cfg()).unwrap();
        assert!(!s.finite);
    }

    #[test]
    fn prior_work_combinations_are_refused() {
        let p = scalar_pencil(I, 1.0, 1.0, ONE, 1.0);
        let ep = scalar_pair(I, [ONE, ONE, ZERO]);
        let e = eta_s(&p, &ep, BlockSelection::JR, &cfg()).unwrap_err();
        assert_eq!(e.to_string(), "not implemented: η^S(J,R) has no closed form here; not implemented");
        assert!(eta_sd(&p, &ep, BlockSelection::JE, &cfg()).is_err());
    }

    #[test]
    fn hypothesis_failures_are_named() {
        let p = gen_pencil_with(3, 1, 2, &PencilOptions::default());
        let mut ep = gen_eigpair(&p, 2, BlockSelection::JREB).unwrap();
        ep.u2[0] += ONE;
        match eta_sd(&p, &ep, BlockSelection::JREB, &cfg()) {
            Err(Error::HypothesisViolated(name)) => assert_eq!(name, "u2=alpha*u1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn block_selection_parsing() {
        for b in BlockSelection::ALL {
            assert_eq!(b.name().parse::<BlockSelection>().unwrap(), b);
        }
        assert_eq!("b,j".parse::<BlockSelection>().unwrap(), BlockSelection::JB);
        assert!("J".parse::<BlockSelection>().is_err());
        assert!("JJ".parse::<BlockSelection>().is_err());
        assert!("JX".parse::<BlockSelection>().is_err());
    }

    #[test]
    fn random_admissible_pairs_reconstruct() {
        let combos = [
            (BlockSelection::JR, Variant::Sd),
            (BlockSelection::RE, Variant::Sd),
            (BlockSelection::JRE, Variant::Sd),
            (BlockSelection::JRB, Variant::Sd),
            (BlockSelection::REB, Variant::Sd),
            (BlockSelection::JREB, Variant::Sd),
            (BlockSelection::RB, Variant::Sd),
            (BlockSelection::RB, Variant::S),
            (BlockSelection::JB, Variant::S),
            (BlockSelection::EB, Variant::S),
            (BlockSelection::JEB, Variant::S),
        ];
        for (blocks, variant) in combos {
            for seed in 0..15 {
                let opts = PencilOptions {
                    r_rank: if blocks.r { None } else { Some(1) },
                };
                let p = gen_pencil_with(3, 1, seed, &opts);
                let ep = gen_eigpair(&p, seed, blocks).unwrap();
                let s = match variant {
                    Variant::S => eta_s(&p, &ep, blocks, &cfg()),
                    Variant::Sd => eta_sd(&p, &ep, blocks, &cfg()),
                }
                .unwrap_or_else(|e| panic!("{blocks} {variant} seed {seed}: {e}"));
                assert!(s.finite, "{blocks} {variant}");
                assert!(s.eta_lower <= s.eta_upper * (1.0 + 1e-12));
                let d = reconstruct_perturbation(&p, &ep, blocks, &s, &cfg()).unwrap();
                assert!((d.block_norm - s.attained).abs() <= 1e-10 * s.attained.max(1.0), "{blocks}");
                if s.exact {
                    assert!((d.block_norm - s.eta_upper).abs() <= 1e-10 * s.eta_upper.max(1.0), "{blocks}");
                }
                // scaling u leaves the bounds unchanged
                let k = c(0.3, -1.7);
                let scaled = EigenPair {
                    u1: &ep.u1 * k,
                    u2: &ep.u2 * k,
                    u3: &ep.u3 * k,
                    ..ep.clone()
                };
                let t = match variant {
                    Variant::S => eta_s(&p, &scaled, blocks, &cfg()),
                    Variant::Sd => eta_sd(&p, &scaled, blocks, &cfg()),
                }
                .unwrap();
                assert!((t.eta_upper - s.eta_upper).abs() <= 1e-10 * s.eta_upper);
                assert!((t.eta_lower - s.eta_lower).abs() <= 1e-10 * s.eta_upper);
            }
        }
    }

    #[test]
    fn sd_delegates_for_unstructured_r() {
        let p = gen_pencil_with(3, 2, 8, &PencilOptions { r_rank: Some(1) });
        for blocks in [BlockSelection::JB, BlockSelection::EB, BlockSelection::JEB] {
            let ep = gen_eigpair(&p, 8, blocks).unwrap();
            let a = eta_s(&p, &ep, blocks, &cfg()).unwrap();
            let b = eta_sd(&p, &ep, blocks, &cfg()).unwrap();
            assert_eq!(a.eta_lower, b.eta_lower);
            assert_eq!(a.eta_upper, b.eta_upper);
            assert_eq!(a.h1, b.h1);
        }
    }
}
