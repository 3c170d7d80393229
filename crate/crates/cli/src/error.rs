use std::path::PathBuf;

use bjorling_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{}: {1}", .0.display())]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("threshold violated: {0}")]
    Threshold(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Io(..) => 3,
            CliError::Threshold(_) => 1,
            CliError::Core(e) => match e {
                Error::InvalidParameter(_) | Error::Irregular { .. } | Error::StripTooWide { .. } | Error::Parse(_) => 2,
                Error::Io { .. } => 3,
                _ => 1,
            },
        }
    }
}
