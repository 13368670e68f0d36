use crate::point::CPoint;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("dimension mismatch: expected n = {expected}, got n = {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("integrand returned a non-finite sample at {at:?}")]
    NonFiniteSample { at: Vec<f64> },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("iteration failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("quadrature diverged: {0}")]
    QuadratureDiverged(String),

    #[error("operator is unbounded (witness direction {witness})")]
    UnboundedOperator { witness: CPoint },

    #[error("unknown experiment `{0}`; see `lab list`")]
    UnknownExperiment(String),

    #[error("norm integral diverged for the supplied function")]
    NormDiverged,

    #[error("invalid operator spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
