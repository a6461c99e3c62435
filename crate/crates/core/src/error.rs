use thiserror::Error;

use crate::model::Regime;

/// Errors raised by the model, likelihood, estimation and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CirError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid sampling scheme: {0}")]
    InvalidScheme(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("critical regime needs n*delta > 1 (got {0})")]
    CriticalHorizonTooShort(f64),
    #[error("local alternative leaves the parameter space: a_n = {a_n} < sigma = {sigma}")]
    AlternativeLeavesParameterSpace { a_n: f64, sigma: f64 },
    #[error("operation requires the {expected} regime, parameters are {actual:?}")]
    WrongRegime {
        expected: &'static str,
        actual: Regime,
    },
    #[error("limit-law draw missing for the {0:?} regime")]
    MissingDraw(Regime),
    #[error("parameter sets have different sigma ({0} vs {1})")]
    SigmaMismatch(f64, f64),
    #[error("finite-difference step leaves the domain a >= sigma")]
    StepLeavesDomain,
    #[error("degenerate design: the score system is singular")]
    DegenerateDesign,
    #[error("empty sample")]
    EmptySample,
    #[error("too few samples: {got} < {min}")]
    TooFewSamples { got: usize, min: usize },
}

pub type Result<T, E = CirError> = std::result::Result<T, E>;
