use std::process::ExitCode;

use thiserror::Error;
use twi_core::TwiError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("tolerance breach: {0}")]
    Tolerance(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Invalid(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Tolerance(_) => 4,
            CliError::Io(_) => 1,
        })
    }
}

impl From<TwiError> for CliError {
    fn from(e: TwiError) -> Self {
        match e {
            TwiError::Io(msg) => CliError::Io(std::io::Error::other(msg)),
            TwiError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
