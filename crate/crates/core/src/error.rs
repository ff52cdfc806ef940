use thiserror::Error;

/// Errors raised by parameter validation and by the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or input violates a domain constraint.
    #[error("{0}")]
    Domain(String),

    #[error("source has a negative entry {value:e} at index {index}")]
    NegativeSource { index: usize, value: f64 },

    #[error("outer iteration did not converge after {iterations} steps (last relative change {last_change:e})")]
    NonConvergence { iterations: usize, last_change: f64 },

    #[error(
        "iterate sup-norm exceeded the overflow cap (ln ||v|| = {ln_sup:.3}); use mu = k_p or a larger gap p - q"
    )]
    Overflow { ln_sup: f64 },

    #[error("Newton did not converge after {iterations} iterations (relative residual {rel_residual:e})")]
    NewtonNonConvergence {
        iterations: usize,
        rel_residual: f64,
    },

    #[error("line search failed: step {step:e} fell below the minimum")]
    LineSearchFailed { step: f64 },

    #[error("linear solve failed: matrix is not positive definite at row {row}")]
    NotPositiveDefinite { row: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by bad input rather than by a failing solver.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::NegativeSource { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
