use num_complex::Complex64;
use thiserror::Error;

use crate::expr::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("jet order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("jet order {0} is not supported (maximum is 3)")]
    UnsupportedOrder(usize),

    #[error("singular point at {at}: {what}")]
    Singular { at: Complex64, what: &'static str },

    #[error("degenerate point at {at}: {what}")]
    Degenerate { at: Complex64, what: &'static str },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("field `{field}`: {source}")]
    Field {
        field: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("inconsistent Weierstrass data: |q^2 h' - g'| = {residual:e} at z = {at}")]
    Inconsistent { at: Complex64, residual: f64 },

    #[error("quadrature did not converge on [{from}, {to}] (estimated error {estimate:e})")]
    Quadrature {
        from: Complex64,
        to: Complex64,
        estimate: f64,
    },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("map specification: {0}")]
    Spec(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn in_field(self, field: &'static str) -> Self {
        Error::Field {
            field,
            source: Box::new(self),
        }
    }
}
