use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the supported numeric range.
    #[error("bounds error: {0}")]
    Bounds(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A model parameter is inconsistent (empty window, clamp mismatch, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// `nu` lies beyond the range where `L_nu(x) > 0`.
    #[error("range error: {0}")]
    Range(String),

    /// A Dirichlet series or Euler product was evaluated at a divergent point.
    #[error("divergence: {0}")]
    Divergence(String),

    /// An iterative method did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (last iterate r = {last_r}, a = {last_a}): {reason}")]
    Convergence {
        iterations: usize,
        last_r: f64,
        last_a: f64,
        reason: String,
    },

    /// A closed-form expression left its domain (e.g. `gamma <= -1`).
    #[error("domain error: {0}")]
    Domain(String),

    /// Exact integer arithmetic overflowed 64 bits.
    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
