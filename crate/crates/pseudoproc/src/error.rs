//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by the numerical stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameters violate a documented precondition.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// An adaptive quadrature exhausted its panel budget before reaching tolerance.
    #[error("quadrature did not converge ({context}): error estimate {err_est:.3e} exceeds tolerance {tol:.3e}")]
    Quadrature {
        context: String,
        err_est: f64,
        tol: f64,
    },
    /// A series or iteration failed to converge within its term budget.
    #[error("series did not converge: {0}")]
    Series(String),
    /// The requested evaluation is outside the numerically supported domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The lattice oracle detected leakage, instability or an unresolved tail.
    #[error("lattice oracle: {0}")]
    Lattice(String),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
