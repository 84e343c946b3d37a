use num_complex::Complex;
use thiserror::Error;

use crate::jet::JetError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),

    #[error("point {at} lies outside the open unit disk")]
    OutsideDisk { at: Complex<f64> },

    #[error("evaluation hit a pole at {at}")]
    Pole { at: Complex<f64> },

    #[error("non-finite value while evaluating {what} at {at}")]
    NonFinite { what: String, at: Complex<f64> },

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("scenario field `{field}`: {msg}")]
    Scenario { field: String, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("linear system is singular or ill-conditioned (condition estimate {cond:e})")]
    Singular { cond: f64 },

    #[error("symbol phi leaves the disk: |phi({at})| = {modulus}")]
    NotSelfMap { at: Complex<f64>, modulus: f64 },

    #[error("operator is not bounded on the sampled grid: {0}")]
    Unbounded(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
