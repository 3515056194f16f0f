use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("out of domain: {0}")]
    OutOfDomain(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("numerical instability at step {step}: {detail}")]
    NumericalInstability { step: usize, detail: String },

    #[error("walker from cube {cube} exceeded {max_steps} steps")]
    DivergentWalker { cube: usize, max_steps: usize },

    #[error("config field `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: u64, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        LabError::InvalidParameter(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the `lab` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Io { .. } => 1,
            LabError::InvalidParameter(_)
            | LabError::Validation { .. }
            | LabError::Parse { .. }
            | LabError::OutOfDomain(_)
            | LabError::DegenerateInput(_) => 2,
            LabError::Resolution(_) | LabError::NumericalInstability { .. } | LabError::DivergentWalker { .. } => 3,
        }
    }
}
