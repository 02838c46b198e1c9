//! Error types shared across grid construction, assembly, solvers, and I/O.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Rejected input to a constructor or operation.
    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    /// The shear slope oscillates on a scale the x-grid cannot resolve at
    /// this value of the scaling parameter.
    #[error("sigma underresolved at s = {s:.6}: maximal admissible s for this grid is {s_max:.6}")]
    SigmaUnderresolved { s: f64, s_max: f64 },

    /// Eigensolve ran out of iterations; carries the best candidate seen.
    #[error("eigensolve did not converge after {iterations} iterations \
             (best value {best_value:.12e}, residual {best_residual:.3e})")]
    NonConvergence {
        best_value: f64,
        best_residual: f64,
        iterations: usize,
    },

    /// A member solve of a curve failed; earlier points are preserved.
    #[error("mu curve aborted at s = {failed_s:.6} after {} completed points: {source}", partial.len())]
    MuCurveAborted {
        failed_s: f64,
        partial: Vec<(f64, f64)>,
        source: Box<Error>,
    },

    /// Cholesky pivot loss: the shifted matrix is not positive definite.
    #[error("matrix not positive definite: pivot {pivot:.3e} at index {index}")]
    NotPositiveDefinite { pivot: f64, index: usize },

    /// Time stepping failure (solver breakdown or a broken step invariant).
    #[error("time step {step} failed: {why}")]
    TimeStep { step: usize, why: String },

    /// Configuration value rejected; names the offending field.
    #[error("config field `{field}`: {why}")]
    Config { field: String, why: String },

    #[error("output directory does not exist: {}", .0.display())]
    MissingOutputDir(PathBuf),

    #[error("degenerate fit window: {0}")]
    FitWindow(String),

    /// Evaluation past the end of a computed curve is refused, never extrapolated.
    #[error("requested s = {requested:.6} lies beyond the computed curve (ends at s = {max_s:.6})")]
    CurveExtrapolation { requested: f64, max_s: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::Invalid { what, why: why.into() }
    }

    pub fn config(field: impl Into<String>, why: impl Into<String>) -> Self {
        Error::Config { field: field.into(), why: why.into() }
    }
}
