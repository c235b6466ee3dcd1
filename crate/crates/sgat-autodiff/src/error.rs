use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AutodiffError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad checkpoint {path}: {msg}")]
    Checkpoint { path: PathBuf, msg: String },

    #[error("non-finite gradient for parameter `{name}`")]
    NonFiniteGradient { name: String },
}

impl AutodiffError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AutodiffError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn checkpoint(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        AutodiffError::Checkpoint {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
