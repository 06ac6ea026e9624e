use thiserror::Error;

use crate::solver::IterationTrace;
use crate::vector::Vector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vector coordinate {index} is not finite")]
    NonFiniteCoordinate { index: usize },

    #[error("sample set is empty")]
    EmptySampleSet,

    #[error("every sample pair has coincident points")]
    DegeneratePair,

    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("expression parse error at byte {position}: {message}")]
    ExpressionParse { position: usize, message: String },

    #[error("expression evaluation error: {0}")]
    ExpressionEval(String),

    #[error("no convergence after {} iterations", .trace.residuals.len())]
    MaxIterationsExceeded { trace: Box<IterationTrace> },

    #[error("divergence detected: ratio tail {gamma_hat} over a full window")]
    DivergenceDetected {
        gamma_hat: f64,
        trace: Box<IterationTrace>,
    },

    #[error("numerical overflow at iteration {iteration}")]
    NumericalOverflow {
        iteration: usize,
        trace: Box<IterationTrace>,
    },

    #[error("point is fixed by the iterate but not by the base map: d(U(p), p) = {residual} > {threshold}")]
    FixedPointNotSharedByU { residual: f64, threshold: f64 },

    #[error("norm domination violated at {witness:?}: {d_norm} > {rho_norm}")]
    DominationViolated {
        witness: Vector,
        d_norm: f64,
        rho_norm: f64,
    },

    #[error("trace too short: need {needed} residuals, have {available}")]
    InsufficientTrace { needed: usize, available: usize },
}

impl Error {
    /// Partial trace carried by solver failures.
    pub fn trace(&self) -> Option<&IterationTrace> {
        match self {
            Error::MaxIterationsExceeded { trace }
            | Error::DivergenceDetected { trace, .. }
            | Error::NumericalOverflow { trace, .. } => Some(trace),
            _ => None,
        }
    }

    /// Stable variant name, used in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NonFiniteCoordinate { .. } => "NonFiniteCoordinate",
            Error::EmptySampleSet => "EmptySampleSet",
            Error::DegeneratePair => "DegeneratePair",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::ExpressionParse { .. } => "ExpressionParseError",
            Error::ExpressionEval(_) => "ExpressionEvalError",
            Error::MaxIterationsExceeded { .. } => "MaxIterationsExceeded",
            Error::DivergenceDetected { .. } => "DivergenceDetected",
            Error::NumericalOverflow { .. } => "NumericalOverflow",
            Error::FixedPointNotSharedByU { .. } => "FixedPointNotSharedByU",
            Error::DominationViolated { .. } => "DominationViolated",
            Error::InsufficientTrace { .. } => "InsufficientTrace",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
