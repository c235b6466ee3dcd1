use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    InvalidConfig(String),

    #[error("checkpoint is missing tensor {name}")]
    MissingTensor { name: String },

    #[error("checkpoint tensor {name} has shape {got:?}, parameters expect {expected:?}")]
    ShapeMismatch {
        name: String,
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("checkpoint contains unknown tensor {name}")]
    UnexpectedTensor { name: String },

    #[error(transparent)]
    Autodiff(#[from] sgat_autodiff::AutodiffError),
}
