//! Shared error type.
//!
//! Every fallible operation in the crate returns [`Error`](crate::Error).
//! Variants split into two broad families: *invalid input* (shapes, ranges,
//! malformed files, infeasible configuration) and *numerical failure*
//! (singular blocks, non-convergence, loss of symmetry). The CLI maps the
//! families onto distinct exit codes, so [`Error::is_numerical`] is part of
//! the contract, not a convenience.

use thiserror::Error;

/// Unified error for all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Two vector lengths (or a vector against a matrix side) disagree.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// Matrix shapes are incompatible for the requested operation.
    #[error("shape mismatch in {context}: {left_rows}x{left_cols} against {right_rows}x{right_cols}")]
    ShapeMismatch {
        context: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    /// An entry that must be finite is NaN or infinite.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    /// An index is outside the valid range for its container.
    #[error("{context}: index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        context: &'static str,
        index: usize,
        limit: usize,
    },

    /// A configuration value or argument fails validation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix (or pivot) is singular to working precision.
    #[error("singular matrix in {context}: pivot magnitude {pivot:.3e} at step {step}")]
    SingularMatrix {
        context: &'static str,
        pivot: f64,
        step: usize,
    },

    /// A retained singular value sits below the pseudo-inverse threshold.
    #[error(
        "singular value {value:.3e} at index {index} below threshold {threshold:.3e}; inverse not formed"
    )]
    SingularValueBelowThreshold {
        index: usize,
        value: f64,
        threshold: f64,
    },

    /// The iterative SVD reduction ran out of sweeps.
    #[error("SVD did not converge after {iterations} iterations (off-diagonal residual {residual:.3e})")]
    SvdNoConvergence { iterations: usize, residual: f64 },

    /// A leaf or Schur complement inside the block inversion is singular.
    /// `path` names the chain of blocks from the root, e.g. `z2.x11.z1`.
    #[error("singular block at {path}: {message}")]
    SingularBlock { path: String, message: String },

    /// Conjugate gradient hit its iteration cap. The best iterate and its
    /// residual norm are preserved so callers can inspect how close it got.
    #[error("conjugate gradient stopped at {iterations} iterations with residual {residual:.3e}")]
    CgMaxIterations {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },

    /// The operator handed to conjugate gradient is measurably asymmetric.
    #[error("operator fails the symmetry probe: discrepancy {discrepancy:.3e}")]
    NonSymmetric { discrepancy: f64 },

    /// Conjugate gradient met a direction of non-positive curvature, which a
    /// symmetric positive definite operator cannot produce.
    #[error("non-positive curvature {value:.3e} at iteration {iteration}; operator is not positive definite")]
    IndefiniteOperator { value: f64, iteration: usize },

    /// A vertex has zero weighted degree, so the normalization is undefined.
    #[error("vertex {vertex} has zero weighted degree")]
    IsolatedVertex { vertex: usize },

    /// A hyperedge contains no vertices.
    #[error("hyperedge {edge} is empty")]
    EmptyHyperedge { edge: usize },

    /// Every simplex coordinate is pinned at zero, so no step can move.
    #[error("all {n} weight coordinates are clamped at zero; simplex step is degenerate")]
    DegenerateSimplex { n: usize },

    /// No user shares a hyperedge with the query image.
    #[error("image vertex {image} has no co-occurring user; owner cannot be resolved")]
    NoOwner { image: usize },

    /// A text input failed to parse.
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// Underlying I/O failure.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics themselves (as opposed to rejected
    /// input). The CLI exits with status 3 for these and 2 otherwise.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularMatrix { .. }
                | Error::SingularValueBelowThreshold { .. }
                | Error::SvdNoConvergence { .. }
                | Error::SingularBlock { .. }
                | Error::CgMaxIterations { .. }
                | Error::NonSymmetric { .. }
                | Error::IndefiniteOperator { .. }
                | Error::IsolatedVertex { .. }
                | Error::DegenerateSimplex { .. }
        )
    }
}
