//! Dense-tensor reverse-mode differentiation, Adam optimization, gradient
//! checking, and parameter checkpointing.

pub mod adam;
pub mod checkpoint;
pub mod error;
pub mod gradcheck;
pub mod matrix;
pub mod tape;

pub use adam::{AdamConfig, AdamState};
pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use error::AutodiffError;
pub use gradcheck::{finite_difference, grad_check, max_rel_error};
pub use matrix::Matrix;
pub use tape::{Tape, TensorId};
