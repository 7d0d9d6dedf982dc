use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Argument outside the domain of the function (pole, branch cut, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// No vertical line separates the left and right pole sets of a Mellin-Barnes integrand.
    #[error("no separating contour: left poles reach {left_bound}, right poles start at {right_bound}")]
    Contour { left_bound: f64, right_bound: f64 },

    #[error("quadrature did not converge: {what} (estimate {estimate:e}, error {error:e})")]
    Convergence {
        what: String,
        estimate: f64,
        error: f64,
    },

    #[error("integral diverges: {0}")]
    Divergence(String),

    /// Two evaluation routes of the same quantity disagree.
    #[error("internal consistency check failed: {what} ({first:e} vs {second:e})")]
    Consistency {
        what: String,
        first: f64,
        second: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
