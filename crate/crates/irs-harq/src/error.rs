//! Error type shared across the library.

/// Errors produced by the numeric routines and samplers.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// An adaptive series or continued fraction failed to reach its
    /// tolerance within the iteration cap. Signals arguments outside the
    /// supported range rather than a recoverable condition.
    #[error("{what} failed to converge within {iterations} iterations")]
    Convergence { what: &'static str, iterations: usize },

    /// A root finder could not bracket the requested target.
    #[error("bracketing failed: {0}")]
    Bracketing(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
