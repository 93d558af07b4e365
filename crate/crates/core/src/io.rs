//! File formats: matrices and pencils as JSON with split real/imaginary
//! arrays, result documents, the `<decimal>i` syntax for imaginary scalars,
//! and the sweep CSV.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dsm::{dsdm_type1, dsdm_type1_anti, dsm_solve, DsmProblem, Type1Problem};
use crate::linalg::{c, CMat, CVec, ToleranceConfig};
use crate::maps::{map_min, map_two_sided, StructureFamily};
use crate::oracle::{oracle_min_structured, verify_solution, OracleBudget, OracleProblem, VerifyReport};
use crate::pencil::{BackwardErrorBounds, ExperimentRow, PHPencil, PerturbationBlocks};
use crate::{Complex64, Error, Result};

pub const TOOL: &str = "dsmkit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_cmat(a: &CMat) -> Self {
        let grid = |f: fn(&Complex64) -> f64| (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| f(&a[(i, j)])).collect()).collect();
        Self {
            rows: a.nrows(),
            cols: a.ncols(),
            re: grid(|z| z.re),
            im: grid(|z| z.im),
        }
    }

    pub fn from_cvec(v: &CVec) -> Self {
        Self::from_cmat(&CMat::from_column_slice(v.len(), 1, v.as_slice()))
    }

    /// Checks shapes and finiteness; `name` labels the error.
    pub fn to_cmat(&self, name: &str) -> Result<CMat> {
        for (part, grid) in [("re", &self.re), ("im", &self.im)] {
            if grid.len() != self.rows || grid.iter().any(|row| row.len() != self.cols) {
                return Err(Error::Parse(format!(
                    "{name}.{part}: expected {}×{} array",
                    self.rows, self.cols
                )));
            }
            if grid.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Parse(format!("{name}.{part}: non-finite entry")));
            }
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| c(self.re[i][j], self.im[i][j])))
    }

    /// Accepts a single column or a single row.
    pub fn to_cvec(&self, name: &str) -> Result<CVec> {
        let a = self.to_cmat(name)?;
        match a.shape() {
            (_, 1) => Ok(a.column(0).into_owned()),
            (1, _) => Ok(a.row(0).transpose()),
            (r, k) => Err(Error::Parse(format!("{name}: expected a vector, got {r}×{k}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct PencilFile {
    pub n: usize,
    pub m: usize,
    pub J: MatrixFile,
    pub R: MatrixFile,
    pub E: MatrixFile,
    pub B: MatrixFile,
    pub S: MatrixFile,
}

impl PencilFile {
    pub fn from_pencil(p: &PHPencil) -> Self {
        Self {
            n: p.n,
            m: p.m,
            J: MatrixFile::from_cmat(&p.j),
            R: MatrixFile::from_cmat(&p.r),
            E: MatrixFile::from_cmat(&p.e),
            B: MatrixFile::from_cmat(&p.b),
            S: MatrixFile::from_cmat(&p.s),
        }
    }

    /// Builds the pencil with shape checks only, so that invariant failures
    /// can be reported block by block.
    pub fn to_pencil_unchecked(&self) -> Result<PHPencil> {
        let (n, m) = (self.n, self.m);
        let get = |f: &MatrixFile, name: &str, rows: usize, cols: usize| -> Result<CMat> {
            let a = f.to_cmat(name)?;
            if a.shape() != (rows, cols) {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}×{}, expected {rows}×{cols}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            Ok(a)
        };
        Ok(PHPencil {
            n,
            m,
            j: get(&self.J, "J", n, n)?,
            r: get(&self.R, "R", n, n)?,
            e: get(&self.E, "E", n, n)?,
            b: get(&self.B, "B", n, m)?,
            s: get(&self.S, "S", m, m)?,
        })
    }

    pub fn to_pencil(&self, cfg: &ToleranceConfig) -> Result<PHPencil> {
        let p = self.to_pencil_unchecked()?;
        PHPencil::new(p.j, p.r, p.e, p.b, p.s, cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    /// `Δx = y`.
    Map,
    /// `Δx = y`, `Δ*z = w`, unstructured.
    TwoSided,
    /// `[Δ1 Δ2]`, `Δ1` structured; `n` rows.
    Dsm,
    /// `ΔX = Y`, `Δ*Z = W`, (anti-)dissipative.
    Type1,
}

/// Output of `map solve`, re-loadable by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub tool: String,
    pub version: String,
    pub seed: Option<u64>,
    pub kind: ProblemKind,
    pub family: StructureFamily,
    pub x: MatrixFile,
    pub y: MatrixFile,
    pub z: Option<MatrixFile>,
    pub w: Option<MatrixFile>,
    pub feasible: bool,
    pub reason: Option<String>,
    pub norm_lower: Option<f64>,
    pub norm_upper: Option<f64>,
    pub exact: bool,
    pub solution: Option<MatrixFile>,
    pub residuals: Option<VerifyReport>,
    pub notes: Vec<String>,
}

impl ResultDocument {
    pub fn problem(&self) -> Result<OracleProblem> {
        let kind = self.kind;
        let need = |f: &Option<MatrixFile>, name: &str| -> Result<MatrixFile> {
            f.clone().ok_or_else(|| Error::Parse(format!("{name}: missing for a {kind:?} problem")))
        };
        Ok(match self.kind {
            ProblemKind::Map => OracleProblem::Map {
                family: self.family,
                x: self.x.to_cvec("x")?,
                y: self.y.to_cvec("y")?,
            },
            ProblemKind::TwoSided => OracleProblem::TwoSided {
                x: self.x.to_cvec("x")?,
                y: self.y.to_cvec("y")?,
                z: need(&self.z, "z")?.to_cvec("z")?,
                w: need(&self.w, "w")?.to_cvec("w")?,
            },
            ProblemKind::Dsm => {
                let y = self.y.to_cvec("y")?;
                let problem = DsmProblem::from_stacked(
                    y.len(),
                    &self.x.to_cvec("x")?,
                    &y,
                    &need(&self.z, "z")?.to_cvec("z")?,
                    &need(&self.w, "w")?.to_cvec("w")?,
                )?;
                OracleProblem::Dsm {
                    family: self.family,
                    problem,
                }
            }
            ProblemKind::Type1 => OracleProblem::Type1 {
                family: self.family,
                problem: Type1Problem::new(
                    self.x.to_cmat("x")?,
                    self.y.to_cmat("y")?,
                    need(&self.z, "z")?.to_cmat("z")?,
                    need(&self.w, "w")?.to_cmat("w")?,
                )?,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub name: String,
    pub kind: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRecord {
    pub delta_j: MatrixFile,
    pub delta_r: MatrixFile,
    pub delta_e: MatrixFile,
    pub delta_b: MatrixFile,
    pub block_norm: f64,
    pub pencil_norm: f64,
    pub residual: f64,
}

impl PerturbationRecord {
    pub fn from_blocks(d: &PerturbationBlocks) -> Self {
        Self {
            delta_j: MatrixFile::from_cmat(&d.dj),
            delta_r: MatrixFile::from_cmat(&d.dr),
            delta_e: MatrixFile::from_cmat(&d.de),
            delta_b: MatrixFile::from_cmat(&d.db),
            block_norm: d.block_norm,
            pencil_norm: d.pencil_norm,
            residual: d.residual,
        }
    }
}

/// Output of single-shot `backerr`. Infinite bounds are `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardErrorDocument {
    pub tool: String,
    pub version: String,
    pub seed: Option<u64>,
    pub lambda: String,
    pub blocks: String,
    pub variant: String,
    pub finite: bool,
    pub eta_lower: Option<f64>,
    pub eta_upper: Option<f64>,
    pub exact: bool,
    pub attained: Option<f64>,
    pub alpha: Option<[f64; 2]>,
    pub h1: MatrixFile,
    pub h2: MatrixFile,
    pub conditions: Vec<ConditionRecord>,
    pub perturbation: Option<PerturbationRecord>,
}

fn finite_or_none(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl BackwardErrorDocument {
    pub fn new(b: &BackwardErrorBounds, seed: Option<u64>, perturbation: Option<&PerturbationBlocks>) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            seed,
            lambda: format_imaginary(b.lambda.im),
            blocks: b.blocks.name(),
            variant: b.variant.name().into(),
            finite: b.finite,
            eta_lower: finite_or_none(b.eta_lower),
            eta_upper: finite_or_none(b.eta_upper),
            exact: b.exact,
            attained: finite_or_none(b.attained),
            alpha: b.alpha.map(|a| [a.re, a.im]),
            h1: MatrixFile::from_cmat(&b.h1),
            h2: MatrixFile::from_cmat(&b.h2),
            conditions: b
                .conditions
                .iter()
                .map(|c| ConditionRecord {
                    name: c.name.into(),
                    kind: format!("{:?}", c.kind).to_lowercase(),
                    holds: c.holds,
                })
                .collect(),
            perturbation: perturbation.map(PerturbationRecord::from_blocks),
        }
    }
}

/// Parses `<decimal>i`, e.g. `0.5i` or `-2i`. A bare decimal is rejected.
pub fn parse_imaginary(s: &str) -> Result<Complex64> {
    let t = s.trim();
    let body = t
        .strip_suffix('i')
        .ok_or_else(|| Error::Parse(format!("\"{s}\": expected a purely imaginary number such as 0.5i")))?;
    if body.is_empty() {
        return Err(Error::Parse(format!("\"{s}\": expected <decimal>i")));
    }
    let im: f64 = body
        .parse()
        .map_err(|_| Error::Parse(format!("\"{s}\": expected <decimal>i with no real part")))?;
    if !im.is_finite() {
        return Err(Error::Parse(format!("\"{s}\": imaginary part must be finite")));
    }
    Ok(c(0.0, im))
}

/// Shortest round-trip decimal followed by `i`.
pub fn format_imaginary(im: f64) -> String {
    format!("{im}i")
}

/// Comma-separated list of `<decimal>i`.
pub fn parse_imaginary_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_imaginary(p).map(|z| z.im))
        .collect()
}

pub const CSV_HEADER: &str = "lambda,eta_lower,eta_upper,finite,conditions";

/// One line per row, in input order. Bounds use shortest round-trip
/// formatting; row failures leave the bounds empty and put the error in the
/// conditions column.
pub fn sweep_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let lam = format_imaginary(row.lambda.im);
        match &row.outcome {
            Ok(b) => {
                let _ = writeln!(
                    out,
                    "{lam},{},{},{},{}",
                    b.eta_lower,
                    b.eta_upper,
                    b.finite,
                    b.conditions_report()
                );
            }
            Err(e) => {
                let msg = e.to_string().replace([',', '\n'], ";");
                let _ = writeln!(out, "{lam},,,false,error: {msg}");
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub lambda: f64,
    pub eta_lower: Option<f64>,
    pub eta_upper: Option<f64>,
    pub finite: bool,
    pub conditions: String,
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Parse(format!("CSV header must be \"{CSV_HEADER}\"")));
    }
    let opt = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| Error::Parse(format!("bad number \"{s}\"")))
        }
    };
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.splitn(5, ',').collect();
            if f.len() != 5 {
                return Err(Error::Parse(format!("expected 5 fields: \"{line}\"")));
            }
            Ok(CsvRow {
                lambda: parse_imaginary(f[0])?.im,
                eta_lower: opt(f[1])?,
                eta_upper: opt(f[2])?,
                finite: f[3].parse().map_err(|_| Error::Parse(format!("bad flag \"{}\"", f[3])))?,
                conditions: f[4].to_string(),
            })
        })
        .collect()
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = to_json(value);
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Routes `map solve` input to the matching solver and records the outcome.
///
/// Without `z, w`: single map. With them: unstructured two-sided map for
/// `Unstructured`; Type-1 dissipative map when `x` and `y` have equal length
/// (or several columns); otherwise the doubly structured map with `n` equal
/// to the length of `y`.
pub fn solve_document(
    family: StructureFamily,
    x: &MatrixFile,
    y: &MatrixFile,
    zw: Option<(&MatrixFile, &MatrixFile)>,
    seed: Option<u64>,
    cfg: &ToleranceConfig,
) -> Result<ResultDocument> {
    let kind = match zw {
        None => ProblemKind::Map,
        Some(_) if family == StructureFamily::Unstructured => ProblemKind::TwoSided,
        Some(_)
            if matches!(family, StructureFamily::Dissipative | StructureFamily::AntiDissipative)
                && (x.cols > 1 || x.rows == y.rows) =>
        {
            ProblemKind::Type1
        }
        Some(_) => ProblemKind::Dsm,
    };
    let mut doc = ResultDocument {
        tool: TOOL.into(),
        version: VERSION.into(),
        seed,
        kind,
        family,
        x: x.clone(),
        y: y.clone(),
        z: zw.map(|p| p.0.clone()),
        w: zw.map(|p| p.1.clone()),
        feasible: false,
        reason: None,
        norm_lower: None,
        norm_upper: None,
        exact: false,
        solution: None,
        residuals: None,
        notes: Vec::new(),
    };
    let problem = doc.problem()?;
    let solved: Result<(CMat, f64, f64, bool, Vec<String>)> = match &problem {
        OracleProblem::Map { family, x, y } => map_min(*family, x, y, cfg).map(|s| {
            let notes = if s.boundary {
                vec!["Re(x*y) ≈ 0: feasible, minimality not certified".to_string()]
            } else {
                Vec::new()
            };
            (s.minimizer, s.min_norm, s.min_norm, !s.boundary, notes)
        }),
        OracleProblem::TwoSided { x, y, z, w } => {
            map_two_sided(x, y, z, w, cfg).map(|s| (s.minimizer, s.min_norm, s.min_norm, true, Vec::new()))
        }
        OracleProblem::Dsm { family, problem } => dsm_solve(*family, problem, cfg).map(|s| {
            let mut notes = vec![format!("sufficiency: {}", s.sufficiency_note())];
            if let Some(c) = s.classical_condition {
                notes.push(format!("classical condition ({}) holds but does not certify minimality", c.note()));
            }
            if s.boundary {
                notes.push("Re(z*w1) ≈ 0: characterization does not apply".into());
            }
            (s.delta(), s.norm_lower, s.norm_upper, s.exact, notes)
        }),
        OracleProblem::Type1 { family, problem } => {
            let r = if *family == StructureFamily::Dissipative {
                dsdm_type1(problem, cfg)
            } else {
                dsdm_type1_anti(problem, cfg)
            };
            r.map(|s| (s.minimizer, s.min_norm, s.min_norm, s.hypotheses_hold, s.warnings))
        }
    };
    match solved {
        Ok((delta, lower, upper, exact, notes)) => {
            doc.feasible = true;
            doc.norm_lower = Some(lower);
            doc.norm_upper = Some(upper);
            doc.exact = exact;
            doc.residuals = Some(verify_solution(&delta, &problem, cfg)?);
            doc.solution = Some(MatrixFile::from_cmat(&delta));
            doc.notes = notes;
            Ok(doc)
        }
        Err(Error::Infeasible(reason)) => {
            doc.reason = Some(reason);
            Ok(doc)
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub norm: f64,
    pub converged: bool,
    /// The oracle found a strictly smaller feasible point than the claimed minimum.
    pub undercut: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub pass: bool,
    pub residuals: VerifyReport,
    /// The stored norm matches the stored solution.
    pub norm_consistent: bool,
    pub oracle: Option<OracleCheck>,
}

/// Re-audits a stored solution; for `exact` documents also checks that the
/// oracle does not find a smaller solution (relative slack `1e-6`).
pub fn verify_document(doc: &ResultDocument, cfg: &ToleranceConfig, budget: &OracleBudget) -> Result<VerifyOutcome> {
    let sol = doc
        .solution
        .as_ref()
        .ok_or_else(|| Error::Parse("document records no solution (infeasible)".into()))?
        .to_cmat("solution")?;
    let problem = doc.problem()?;
    let residuals = verify_solution(&sol, &problem, cfg)?;
    let upper = doc.norm_upper.ok_or_else(|| Error::Parse("norm_upper: missing".into()))?;
    let norm_consistent = (sol.norm() - upper).abs() <= 1e-9 * upper.max(1.0);
    let oracle = if doc.exact {
        let o = oracle_min_structured(&problem, budget)?;
        Some(OracleCheck {
            norm: o.norm,
            converged: o.converged,
            undercut: o.norm < upper * (1.0 - 1e-6),
        })
    } else {
        None
    };
    let pass = residuals.pass && norm_consistent && oracle.as_ref().is_none_or(|o| !o.undercut);
    Ok(VerifyOutcome {
        pass,
        residuals,
        norm_consistent,
        oracle,
    })
}
