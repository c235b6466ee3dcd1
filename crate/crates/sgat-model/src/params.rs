use std::collections::HashMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sgat_autodiff::{load_checkpoint, save_checkpoint, Matrix};
use sgat_core::SimplicialComplexBundle;

use crate::config::ModelConfig;
use crate::error::ModelError;

/// Shape inputs the parameter set is built from: the lift feature width per
/// level, how many hop scales the bundle carries, and the label arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDims {
    pub level_dims: Vec<usize>,
    pub eta_count: usize,
    pub class_count: usize,
}

impl ModelDims {
    pub fn from_bundle(bundle: &SimplicialComplexBundle, class_count: usize) -> Self {
        let level_dims = bundle.per_eta[0]
            .features
            .iter()
            .map(|m| m.cols)
            .collect();
        Self {
            level_dims,
            eta_count: bundle.eta_max,
            class_count,
        }
    }

    pub fn k_max(&self) -> usize {
        self.level_dims.len() - 1
    }
}

/// One attention head: projections for the level's own rows and for the
/// level above (the connecting slot), plus the scoring vector over the three
/// concatenated blocks, stored as a column.
#[derive(Debug, Clone)]
pub struct AttentionHead {
    pub w_own: Matrix,
    pub w_conn: Matrix,
    pub attn: Matrix,
}

/// Hop-scale scoring parameters for one (level, scale) pair.
#[derive(Debug, Clone)]
pub struct FusionHead {
    pub map: Matrix,
    pub bias: Matrix,
    pub q: Matrix,
}

/// All trainable tensors. `attention[layer][scale][level][head]`;
/// `fusion[level][scale]` is empty when the bundle has a single hop scale;
/// the classifier maps the per-layer concatenation of vertex-level outputs
/// to class logits.
#[derive(Debug, Clone)]
pub struct SGATParams {
    pub attention: Vec<Vec<Vec<Vec<AttentionHead>>>>,
    pub fusion: Vec<Vec<FusionHead>>,
    pub classifier: Matrix,
}

/// Width of the rows feeding level `k` at layer `l`: lift features at the
/// first layer and at the top level (which is never updated), the fused
/// hidden width everywhere else.
pub(crate) fn input_dim(cfg: &ModelConfig, dims: &ModelDims, layer: usize, k: usize) -> usize {
    if layer == 0 || k == dims.k_max() {
        dims.level_dims[k]
    } else {
        cfg.hidden
    }
}

impl SGATParams {
    /// Fan-scaled uniform init, fully determined by `seed`.
    pub fn init(cfg: &ModelConfig, dims: &ModelDims, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let width = cfg.head_width();
        let k_max = dims.k_max();
        let attention = (0..cfg.layers)
            .map(|l| {
                (0..dims.eta_count)
                    .map(|_| {
                        (0..k_max)
                            .map(|k| {
                                (0..cfg.heads)
                                    .map(|_| AttentionHead {
                                        w_own: glorot(
                                            input_dim(cfg, dims, l, k),
                                            width,
                                            &mut rng,
                                        ),
                                        w_conn: glorot(
                                            input_dim(cfg, dims, l, k + 1),
                                            width,
                                            &mut rng,
                                        ),
                                        attn: glorot(3 * width, 1, &mut rng),
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let fusion = if dims.eta_count >= 2 {
            (0..k_max)
                .map(|_| {
                    (0..dims.eta_count)
                        .map(|_| FusionHead {
                            map: glorot(cfg.hidden, cfg.fusion_dim, &mut rng),
                            bias: Matrix::zeros(1, cfg.fusion_dim),
                            q: glorot(cfg.fusion_dim, 1, &mut rng),
                        })
                        .collect()
                })
                .collect()
        } else {
            Vec::new()
        };
        let classifier = glorot(cfg.layers * cfg.hidden, dims.class_count, &mut rng);
        Self { attention, fusion, classifier }
    }

    /// Walks every tensor in a fixed order with its stable name.
    pub fn visit(&self, f: &mut dyn FnMut(&str, &Matrix)) {
        for (l, per_scale) in self.attention.iter().enumerate() {
            for (e, per_level) in per_scale.iter().enumerate() {
                for (k, heads) in per_level.iter().enumerate() {
                    for (p, h) in heads.iter().enumerate() {
                        f(&format!("layer{l}.scale{e}.level{k}.head{p}.w_own"), &h.w_own);
                        f(&format!("layer{l}.scale{e}.level{k}.head{p}.w_conn"), &h.w_conn);
                        f(&format!("layer{l}.scale{e}.level{k}.head{p}.attn"), &h.attn);
                    }
                }
            }
        }
        for (k, per_scale) in self.fusion.iter().enumerate() {
            for (e, fh) in per_scale.iter().enumerate() {
                f(&format!("fusion.level{k}.scale{e}.map"), &fh.map);
                f(&format!("fusion.level{k}.scale{e}.bias"), &fh.bias);
                f(&format!("fusion.level{k}.scale{e}.q"), &fh.q);
            }
        }
        f("classifier", &self.classifier);
    }

    /// Mutable walk in the same order; the first error aborts it.
    pub fn try_visit_mut(
        &mut self,
        f: &mut dyn FnMut(&str, &mut Matrix) -> Result<(), ModelError>,
    ) -> Result<(), ModelError> {
        for (l, per_scale) in self.attention.iter_mut().enumerate() {
            for (e, per_level) in per_scale.iter_mut().enumerate() {
                for (k, heads) in per_level.iter_mut().enumerate() {
                    for (p, h) in heads.iter_mut().enumerate() {
                        f(&format!("layer{l}.scale{e}.level{k}.head{p}.w_own"), &mut h.w_own)?;
                        f(&format!("layer{l}.scale{e}.level{k}.head{p}.w_conn"), &mut h.w_conn)?;
                        f(&format!("layer{l}.scale{e}.level{k}.head{p}.attn"), &mut h.attn)?;
                    }
                }
            }
        }
        for (k, per_scale) in self.fusion.iter_mut().enumerate() {
            for (e, fh) in per_scale.iter_mut().enumerate() {
                f(&format!("fusion.level{k}.scale{e}.map"), &mut fh.map)?;
                f(&format!("fusion.level{k}.scale{e}.bias"), &mut fh.bias)?;
                f(&format!("fusion.level{k}.scale{e}.q"), &mut fh.q)?;
            }
        }
        f("classifier", &mut self.classifier)
    }

    pub fn parameter_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_, m| n += m.data.len());
        n
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        let mut named: Vec<(String, Matrix)> = Vec::new();
        self.visit(&mut |name, m| named.push((name.to_string(), m.clone())));
        let refs: Vec<(String, &Matrix)> =
            named.iter().map(|(n, m)| (n.clone(), m)).collect();
        save_checkpoint(path, &refs)?;
        Ok(())
    }

    /// Replaces every tensor with its checkpoint counterpart; names and
    /// shapes must match the existing structure exactly.
    pub fn load_into(&mut self, path: &Path) -> Result<(), ModelError> {
        let mut by_name: HashMap<String, Matrix> =
            load_checkpoint(path)?.into_iter().collect();
        self.try_visit_mut(&mut |name, m| {
            let found = by_name
                .remove(name)
                .ok_or_else(|| ModelError::MissingTensor { name: name.to_string() })?;
            if (found.rows, found.cols) != (m.rows, m.cols) {
                return Err(ModelError::ShapeMismatch {
                    name: name.to_string(),
                    expected: (m.rows, m.cols),
                    got: (found.rows, found.cols),
                });
            }
            *m = found;
            Ok(())
        })?;
        if let Some(name) = by_name.into_keys().next() {
            return Err(ModelError::UnexpectedTensor { name });
        }
        Ok(())
    }
}

fn glorot(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let data = (0..rows * cols)
        .map(|_| rng.random_range(-limit..=limit))
        .collect();
    Matrix::from_flat(rows, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_dims() -> ModelDims {
        ModelDims { level_dims: vec![5, 5, 5], eta_count: 2, class_count: 3 }
    }

    fn small_cfg() -> ModelConfig {
        ModelConfig { hidden: 8, heads: 2, fusion_dim: 4, ..Default::default() }
    }

    #[test]
    fn init_is_seed_deterministic() {
        let (cfg, dims) = (small_cfg(), small_dims());
        let a = SGATParams::init(&cfg, &dims, 9);
        let b = SGATParams::init(&cfg, &dims, 9);
        let c = SGATParams::init(&cfg, &dims, 10);
        let mut flat_a = Vec::new();
        a.visit(&mut |_, m| flat_a.extend_from_slice(&m.data));
        let mut flat_b = Vec::new();
        b.visit(&mut |_, m| flat_b.extend_from_slice(&m.data));
        let mut flat_c = Vec::new();
        c.visit(&mut |_, m| flat_c.extend_from_slice(&m.data));
        assert_eq!(flat_a, flat_b);
        assert_ne!(flat_a, flat_c);
    }

    #[test]
    fn names_are_unique_and_shapes_line_up() {
        let (cfg, dims) = (small_cfg(), small_dims());
        let p = SGATParams::init(&cfg, &dims, 1);
        let mut names = Vec::new();
        p.visit(&mut |name, _| names.push(name.to_string()));
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        // 2 layers x 2 scales x 2 levels x 2 heads x 3 tensors, 2 levels x
        // 2 scales x 3 fusion tensors, 1 classifier.
        assert_eq!(names.len(), 48 + 12 + 1);
        assert_eq!(p.classifier.rows, 2 * 8);
        assert_eq!(p.classifier.cols, 3);
        // Layer 0 reads lift widths, layer 1 reads the hidden width except
        // at the top level.
        assert_eq!(p.attention[0][0][0][0].w_own.rows, 5);
        assert_eq!(p.attention[1][0][0][0].w_own.rows, 8);
        assert_eq!(p.attention[1][0][1][0].w_conn.rows, 5);
        assert_eq!(p.attention[1][0][0][0].w_conn.rows, 8);
    }

    #[test]
    fn fan_bound_holds() {
        let (cfg, dims) = (small_cfg(), small_dims());
        let p = SGATParams::init(&cfg, &dims, 2);
        p.visit(&mut |name, m| {
            if name.ends_with("bias") {
                assert!(m.data.iter().all(|&x| x == 0.0));
            } else {
                let limit = (6.0 / (m.rows + m.cols) as f64).sqrt();
                assert!(m.data.iter().all(|&x| x.abs() <= limit), "{name} out of range");
            }
        });
    }

    #[test]
    fn single_scale_has_no_fusion_tensors() {
        let cfg = small_cfg();
        let dims = ModelDims { eta_count: 1, ..small_dims() };
        let p = SGATParams::init(&cfg, &dims, 3);
        assert!(p.fusion.is_empty());
        let mut names = Vec::new();
        p.visit(&mut |name, _| names.push(name.to_string()));
        assert!(names.iter().all(|n| !n.starts_with("fusion")));
    }

    #[test]
    fn checkpoint_round_trip_and_mismatches() {
        let (cfg, dims) = (small_cfg(), small_dims());
        let p = SGATParams::init(&cfg, &dims, 4);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("params.bin");
        p.save(&path).unwrap();

        let mut q = SGATParams::init(&cfg, &dims, 5);
        q.load_into(&path).unwrap();
        let mut flat_p = Vec::new();
        p.visit(&mut |_, m| flat_p.extend_from_slice(&m.data));
        let mut flat_q = Vec::new();
        q.visit(&mut |_, m| flat_q.extend_from_slice(&m.data));
        assert_eq!(flat_p, flat_q);

        let wider = ModelConfig { hidden: 16, heads: 2, ..small_cfg() };
        let mut r = SGATParams::init(&wider, &dims, 6);
        match r.load_into(&path) {
            Err(ModelError::ShapeMismatch { .. }) => {}
            other => panic!("expected shape mismatch, got {other:?}"),
        }

        let fewer = ModelDims { eta_count: 1, ..small_dims() };
        let mut s = SGATParams::init(&cfg, &fewer, 7);
        match s.load_into(&path) {
            Err(ModelError::MissingTensor { .. }) | Err(ModelError::UnexpectedTensor { .. }) => {}
            other => panic!("expected name mismatch, got {other:?}"),
        }
    }
}
