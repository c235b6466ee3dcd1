use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    ConfigParse { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] sgat_core::CoreError),
    #[error(transparent)]
    Model(#[from] sgat_model::ModelError),
    #[error(transparent)]
    Autodiff(#[from] sgat_autodiff::AutodiffError),
    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Diverged { epoch: usize },
    #[error("serializing {what}: {message}")]
    Serialize { what: String, message: String },
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
