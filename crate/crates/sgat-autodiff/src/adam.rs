//! Adam with bias correction and decoupled weight decay. Parameters are
//! identified by name; moment buffers are allocated on first use.

use std::collections::HashMap;

use crate::error::AutodiffError;
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdamState {
    cfg: AdamConfig,
    step: u64,
    moments: HashMap<String, (Vec<f64>, Vec<f64>)>,
}

impl AdamState {
    pub fn new(cfg: AdamConfig) -> Self {
        Self {
            cfg,
            step: 0,
            moments: HashMap::new(),
        }
    }

    pub fn config(&self) -> &AdamConfig {
        &self.cfg
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Advances the shared step counter; call once before the `apply` calls
    /// of an optimization step.
    pub fn begin_step(&mut self) {
        self.step += 1;
    }

    /// Updates one named parameter in place from its gradient.
    pub fn apply(
        &mut self,
        name: &str,
        param: &mut Matrix,
        grad: &[f64],
    ) -> Result<(), AutodiffError> {
        assert!(self.step > 0, "begin_step before apply");
        assert_eq!(
            param.data.len(),
            grad.len(),
            "gradient length mismatch for `{name}`"
        );
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(AutodiffError::NonFiniteGradient {
                name: name.to_string(),
            });
        }
        let (m, v) = self
            .moments
            .entry(name.to_string())
            .or_insert_with(|| (vec![0.0; grad.len()], vec![0.0; grad.len()]));
        let c = &self.cfg;
        let bc1 = 1.0 - c.beta1.powi(self.step as i32);
        let bc2 = 1.0 - c.beta2.powi(self.step as i32);
        for ((p, g), (mi, vi)) in param
            .data
            .iter_mut()
            .zip(grad)
            .zip(m.iter_mut().zip(v.iter_mut()))
        {
            *mi = c.beta1 * *mi + (1.0 - c.beta1) * g;
            *vi = c.beta2 * *vi + (1.0 - c.beta2) * g * g;
            let m_hat = *mi / bc1;
            let v_hat = *vi / bc2;
            // Decoupled decay: shrink the parameter directly, outside the
            // moment estimates.
            *p -= c.lr * c.weight_decay * *p;
            *p -= c.lr * m_hat / (v_hat.sqrt() + c.eps);
        }
        Ok(())
    }
}
