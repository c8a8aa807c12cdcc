use thiserror::Error;

pub type Result<T> = std::result::Result<T, TwiError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwiError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("path `{path_id}` is malformed: {reason}")]
    MalformedPath { path_id: String, reason: String },

    #[error("margin multiplier undefined for alpha = {alpha} (must lie in [0, 1))")]
    Domain { alpha: f64 },

    #[error("stage distributions use different frame durations ({left} ms vs {right} ms)")]
    FrameMismatch { left: f64, right: f64 },

    #[error("infeasible instance: total drop probability {total_drop} exceeds budget {epsilon}")]
    Infeasible { total_drop: f64, epsilon: f64 },

    #[error("solver did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl TwiError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        TwiError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for TwiError {
    fn from(err: std::io::Error) -> Self {
        TwiError::Io(err.to_string())
    }
}

impl From<csv::Error> for TwiError {
    fn from(err: csv::Error) -> Self {
        TwiError::Io(err.to_string())
    }
}
