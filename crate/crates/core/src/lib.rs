//! Doubly structured matrix mappings and structure-preserving eigenpair
//! backward errors for port-Hamiltonian pencils.
//!
//! A doubly structured mapping (DSM) is a matrix `Δ = [Δ1 Δ2]` with `Δ1` in a
//! structure family (Hermitian, skew-Hermitian, symmetric, skew-symmetric,
//! semidefinite, dissipative) such that `Δx = y` and `Δ*z = w`. The crate
//! provides closed-form minimal Frobenius-norm solutions, characterizations of
//! all solutions, and their use in computing backward errors of approximate
//! eigenpairs of pencils
//!
//! ```text
//!        [ 0       J-R   B ]       [  0   E  0 ]
//! L(z) = [ (J-R)*  0     0 ] + z · [ -E*  0  0 ]
//!        [ B*      0     S ]       [  0   0  0 ]
//! ```
//!
//! Modules:
//! - [`linalg`]: pseudoinverse, projectors, SVD splits, semidefiniteness tests.
//! - [`maps`]: single-structure mappings and the two-sided unstructured mapping.
//! - [`dsm`]: doubly structured solvers, dissipative variants, Jordan/Lie reduction.
//! - [`pencil`]: pencil model, backward-error routing, generators, sweeps.
//! - [`oracle`]: independent least-norm and convex-projection references.
//! - [`io`]: JSON/CSV formats shared by the `dsmkit` binary.

pub mod dsm;
pub mod io;
pub mod linalg;
pub mod maps;
pub mod oracle;
pub mod pencil;

pub use linalg::{CMat, CVec, ToleranceConfig};
pub use num_complex::Complex64;

/// Errors surfaced by solvers, generators and I/O.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("vectors not colinear: {0}")]
    NotColinear(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("free-parameter constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("inconsistent constraints: {0}")]
    Inconsistent(String),
    #[error("not implemented: {0}")]
    NotImplemented(String),
    #[error("generation failed: {0}")]
    Generation(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
