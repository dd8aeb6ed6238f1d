use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TroError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("covariance is not positive semidefinite: pivot {index} = {value:e}")]
    NotPositiveSemidefinite { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("support incompatible with {kind} set: {detail}")]
    IncompatibleSupport { kind: &'static str, detail: String },

    #[error("{kind} is not supported for {problem}")]
    UnsupportedSet {
        kind: &'static str,
        problem: &'static str,
    },

    #[error("Burg dual did not converge after {iterations} iterations (last iterate {last:e}, residual {residual:e})")]
    BurgDualNonConvergence {
        iterations: usize,
        last: f64,
        residual: f64,
    },

    #[error("total-variation cross-check failed: greedy {greedy} vs dual {dual}")]
    TvInconsistency { greedy: f64, dual: f64 },

    #[error("bracketing failed, objective appears non-convex: {trace}")]
    BracketingFailure { trace: String },

    #[error("linear program is {0}")]
    LinearProgram(&'static str),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for TroError {
    fn from(e: std::io::Error) -> Self {
        TroError::Io(e.to_string())
    }
}

impl From<csv::Error> for TroError {
    fn from(e: csv::Error) -> Self {
        TroError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, TroError>;
