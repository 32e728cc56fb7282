use pasf_core::LabError;
use thiserror::Error;

/// Failures that end a run without a report. Exit codes follow sysexits.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(#[from] LabError),
    #[error("cannot read input: {0}")]
    NoInput(String),
    #[error("cannot write output: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Data(LabError::Io(_)) | CliError::NoInput(_) => 66,
            CliError::Data(_) => 65,
            CliError::Io(_) => 74,
        }
    }
}

pub fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}
