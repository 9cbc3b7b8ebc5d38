use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("parameter error: {0}")]
    Param(String),

    #[error(transparent)]
    Core(#[from] kp5_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("configuration: {0}")]
    Config(#[from] serde_json::Error),
}

impl LabError {
    /// 2 for bad parameters, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Param(_) | LabError::Config(_) => 2,
            LabError::Core(kp5_core::Error::Io(_)) | LabError::Io { .. } => 1,
            LabError::Core(e) if e.is_numerical() => 3,
            LabError::Core(_) => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;
