use thiserror::Error;

use crate::fem::Field;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not reach tolerance {tol:e} on [{a}, {b}] within {budget} intervals")]
    QuadratureFailure { a: f64, b: f64, tol: f64, budget: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: Box<Field>,
    },

    #[error("lambda bracket invalid: {0}")]
    BracketInvalid(String),

    #[error("mountain-pass geometry not detected: {0}")]
    GeometryFailure(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
