use std::path::PathBuf;

use blockade::BlockadeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Malformed or invalid scenario; `path` locates the offending field.
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("numerical failure: {0}")]
    Numerical(BlockadeError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Scenarios that ran but hit a numerical failure; their records say why.
    #[error("{} scenario(s) failed: {}", .0.len(), .0.join(", "))]
    RunFailed(Vec<String>),

    #[error("{failed} reference check(s) failed")]
    ReferenceCheck { failed: usize },
}

impl HarnessError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Converts a core error, treating validation failures as config errors
    /// located under `prefix`.
    pub fn from_core(prefix: &str, e: BlockadeError) -> Self {
        let join = |field: &str| {
            if prefix.is_empty() {
                field.to_string()
            } else {
                format!("{prefix}.{field}")
            }
        };
        match e {
            BlockadeError::InvalidParameter { ref field, .. } => {
                Self::config(join(field), e.to_string())
            }
            BlockadeError::TruncationTooSmall { .. } => {
                Self::config(join("truncation"), e.to_string())
            }
            BlockadeError::EmptySearchSpace => Self::config(join("space"), e.to_string()),
            other => Self::Numerical(other),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => 2,
            Self::Numerical(_) | Self::RunFailed(_) => 3,
            Self::Io { .. } => 1,
            Self::ReferenceCheck { .. } => 4,
        }
    }
}
