use gpnet::data::DataError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, configuration or input files.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] DataError),
    /// A score, fit or search that could not be completed.
    #[error("{0}")]
    Compute(String),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Data(_) => 2,
            CliError::Compute(_) | CliError::Output { .. } => 1,
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
