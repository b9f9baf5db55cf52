use thiserror::Error;

use crate::linalg::Vector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("non-finite value in input")]
    NonFinite,

    #[error("estimate did not converge after {iterations} iterations (last estimate {estimate})")]
    Unconverged {
        estimate: f64,
        iterations: usize,
        last_iterate: Vector,
    },

    #[error("matrix has no eigenvalue above the rank threshold")]
    NoPositiveEigenvalue,

    #[error("iterate became non-finite at iteration {k} (component {component})")]
    Divergence { k: usize, component: usize },

    #[error("insufficient data: need at least {needed} records, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("hypotheses not satisfied: {0}")]
    Hypotheses(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
