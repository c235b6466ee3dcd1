use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Activation applied to each head's aggregated output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Elu,
    Tanh,
}

/// Network hyperparameters. `hidden` is the full per-simplex embedding
/// width, split evenly over `heads`; `fusion_dim` only matters when the
/// bundle carries more than one hop scale. Dropout zeroes input rows during
/// training and never touches attention weights, so weight rows always
/// normalize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub hidden: usize,
    pub heads: usize,
    pub layers: usize,
    pub leaky_slope: f64,
    pub activation: Activation,
    pub dropout: f64,
    pub fusion_dim: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            hidden: 64,
            heads: 8,
            layers: 2,
            leaky_slope: 0.2,
            activation: Activation::Elu,
            dropout: 0.0,
            fusion_dim: 128,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.hidden == 0 || self.heads == 0 || !self.hidden.is_multiple_of(self.heads) {
            return Err(ModelError::InvalidConfig(format!(
                "hidden {} must be a positive multiple of heads {}",
                self.hidden, self.heads
            )));
        }
        if self.layers == 0 {
            return Err(ModelError::InvalidConfig("layers must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(ModelError::InvalidConfig(format!(
                "dropout {} outside [0, 1)",
                self.dropout
            )));
        }
        if self.fusion_dim == 0 {
            return Err(ModelError::InvalidConfig("fusion_dim must be positive".into()));
        }
        if self.leaky_slope < 0.0 || self.leaky_slope >= 1.0 {
            return Err(ModelError::InvalidConfig(format!(
                "leaky_slope {} outside [0, 1)",
                self.leaky_slope
            )));
        }
        Ok(())
    }

    pub fn head_width(&self) -> usize {
        self.hidden / self.heads
    }
}
