use thiserror::Error;

use crate::expr::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("pole: division by zero at {at}")]
    Pole { at: f64 },

    #[error("domain error: {func} is undefined at {value}")]
    Domain { func: &'static str, value: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },

    /// An integrand failure tagged with the abscissa that triggered it.
    #[error("evaluation failed at x = {x}: {source}")]
    Evaluation { x: f64, source: Box<Error> },

    #[error("reference integral did not converge: {0}")]
    OracleFailure(String),

    #[error("ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("moment check failed: got {got}, expected {expected}")]
    MomentMismatch { got: f64, expected: f64 },
}

impl Error {
    pub(crate) fn at(self, x: f64) -> Error {
        match self {
            e @ Error::Evaluation { .. } => e,
            e => Error::Evaluation { x, source: Box::new(e) },
        }
    }

    /// True for failures caused by evaluating the integrand outside its domain.
    pub fn is_domain(&self) -> bool {
        match self {
            Error::Pole { .. } | Error::Domain { .. } => true,
            Error::Evaluation { source, .. } => source.is_domain(),
            _ => false,
        }
    }
}
