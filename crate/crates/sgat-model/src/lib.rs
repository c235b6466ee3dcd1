//! Simplicial attention network over lifted complexes: per-level multi-head
//! attention with a connecting-simplex slot, hop-scale fusion, layer
//! stacking, and a linear classifier over the vertex-level embeddings.

mod config;
mod error;
mod forward;
mod inputs;
mod params;

pub use config::{Activation, ModelConfig};
pub use error::ModelError;
pub use forward::{
    model_forward, model_loss, AttentionRecord, ForwardOptions, ForwardPass, ForwardTrace,
    FusionRecord,
};
pub use inputs::{AdjacencyIndex, ModelInputs};
pub use params::{AttentionHead, FusionHead, ModelDims, SGATParams};
