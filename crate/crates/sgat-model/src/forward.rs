use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sgat_autodiff::{Tape, TensorId};

use crate::config::{Activation, ModelConfig};
use crate::inputs::{AdjacencyIndex, ModelInputs};
use crate::params::{input_dim, ModelDims, SGATParams};

/// Per-call switches: training mode turns input-row dropout on when the
/// config asks for it, and the seed makes the masks reproducible.
#[derive(Debug, Clone, Copy, Default)]
pub struct ForwardOptions {
    pub train: bool,
    pub dropout_seed: u64,
}

/// Normalized attention weights of one (layer, scale, level, head) run,
/// aligned with the adjacency entry list.
#[derive(Debug, Clone)]
pub struct AttentionRecord {
    pub layer: usize,
    pub scale: usize,
    pub level: usize,
    pub head: usize,
    pub alpha: TensorId,
    pub segments: Rc<Vec<usize>>,
    pub segment_count: usize,
}

/// Scale-mixing weights of one (layer, level) fusion, one row per hop scale.
#[derive(Debug, Clone)]
pub struct FusionRecord {
    pub layer: usize,
    pub level: usize,
    pub beta: TensorId,
}

#[derive(Debug, Clone, Default)]
pub struct ForwardTrace {
    pub attention: Vec<AttentionRecord>,
    pub fusion: Vec<FusionRecord>,
}

/// Handles out of one recorded forward pass: the logit tensor (one row per
/// vertex-level global simplex), the attention/fusion weights, and the leaf
/// id of every parameter so gradients can be read back by name.
pub struct ForwardPass {
    pub logits: TensorId,
    pub trace: ForwardTrace,
    pub param_leaves: Vec<(String, TensorId)>,
}

struct BoundHead {
    w_own: TensorId,
    w_conn: TensorId,
    attn: TensorId,
}

struct BoundFusion {
    map: TensorId,
    bias: TensorId,
    q: TensorId,
}

/// Records the whole network on `tape`: per layer and hop scale, multi-head
/// attention over every level below the top; per level, scale fusion onto
/// the global row order, which feeds every scale of the next layer; finally
/// the classifier over the concatenated per-layer vertex outputs. Top-level
/// rows are re-read from the lift features at every layer.
pub fn model_forward(
    tape: &mut Tape,
    inputs: &ModelInputs,
    params: &SGATParams,
    cfg: &ModelConfig,
    opts: &ForwardOptions,
) -> ForwardPass {
    let k_max = inputs.k_max;
    let eta_count = inputs.eta_count;
    let (attention, fusion, classifier, param_leaves) =
        bind_params(tape, params, inputs, cfg);

    let mut trace = ForwardTrace::default();
    let mut dropout_rng = ChaCha8Rng::seed_from_u64(opts.dropout_seed);
    let drop_rate = if opts.train { cfg.dropout } else { 0.0 };

    let mut state: Vec<Vec<TensorId>> = inputs
        .features
        .iter()
        .map(|per_level| per_level.iter().map(|m| tape.leaf(m)).collect())
        .collect();
    let mut vertex_layers = Vec::with_capacity(cfg.layers);

    for (l, attn_layer) in attention.iter().enumerate() {
        let view: Vec<Vec<TensorId>> = state
            .iter()
            .map(|per_level| {
                per_level
                    .iter()
                    .map(|&x| dropped(tape, x, drop_rate, &mut dropout_rng))
                    .collect()
            })
            .collect();

        let mut branch: Vec<Vec<TensorId>> = Vec::with_capacity(eta_count);
        for e in 0..eta_count {
            let mut per_level = Vec::with_capacity(k_max);
            for k in 0..k_max {
                per_level.push(attention_sublayer(
                    tape,
                    &inputs.adjacency[e][k],
                    &attn_layer[e][k],
                    view[e][k],
                    view[e][k + 1],
                    cfg,
                    (l, e, k),
                    &mut trace,
                ));
            }
            branch.push(per_level);
        }

        for k in 0..k_max {
            let fused = if eta_count == 1 {
                branch[0][k]
            } else {
                fuse_level(tape, inputs, &fusion[k], &branch, k, cfg, l, &mut trace)
            };
            if k == 0 {
                vertex_layers.push(fused);
            }
            for (e, scale_state) in state.iter_mut().enumerate() {
                scale_state[k] = tape.gather_rows(fused, inputs.membership[k][e].clone());
            }
        }
    }

    let concat = tape.concat_cols(&vertex_layers);
    let logits = tape.matmul(concat, classifier);
    ForwardPass { logits, trace, param_leaves }
}

/// Masked mean cross-entropy over the vertex-level logit rows listed in
/// `mask`; `labels` holds one class id per row (rows outside the mask are
/// ignored).
pub fn model_loss(
    tape: &mut Tape,
    logits: TensorId,
    labels: &[u32],
    mask: &[usize],
) -> TensorId {
    tape.cross_entropy(logits, Rc::new(labels.to_vec()), Rc::new(mask.to_vec()))
}

type BoundAttention = Vec<Vec<Vec<Vec<BoundHead>>>>;
type BoundModel = (BoundAttention, Vec<Vec<BoundFusion>>, TensorId, Vec<(String, TensorId)>);

fn bind_params(
    tape: &mut Tape,
    params: &SGATParams,
    inputs: &ModelInputs,
    cfg: &ModelConfig,
) -> BoundModel {
    let dims = ModelDims {
        level_dims: inputs.level_dims.clone(),
        eta_count: inputs.eta_count,
        class_count: params.classifier.cols,
    };
    assert_eq!(
        params.attention.len(),
        cfg.layers,
        "parameter set holds {} layers, config asks for {}",
        params.attention.len(),
        cfg.layers
    );
    let mut leaves = Vec::new();
    let attention: BoundAttention = params
        .attention
        .iter()
        .enumerate()
        .map(|(l, per_scale)| {
            per_scale
                .iter()
                .enumerate()
                .map(|(e, per_level)| {
                    per_level
                        .iter()
                        .enumerate()
                        .map(|(k, heads)| {
                            heads
                                .iter()
                                .enumerate()
                                .map(|(p, h)| {
                                    assert_eq!(
                                        (h.w_own.rows, h.w_conn.rows),
                                        (
                                            input_dim(cfg, &dims, l, k),
                                            input_dim(cfg, &dims, l, k + 1)
                                        ),
                                        "layer {l} scale {e} level {k} head {p}: \
                                         projection rows do not match the input widths"
                                    );
                                    let head = BoundHead {
                                        w_own: tape.leaf(&h.w_own),
                                        w_conn: tape.leaf(&h.w_conn),
                                        attn: tape.leaf(&h.attn),
                                    };
                                    leaves.push((
                                        format!("layer{l}.scale{e}.level{k}.head{p}.w_own"),
                                        head.w_own,
                                    ));
                                    leaves.push((
                                        format!("layer{l}.scale{e}.level{k}.head{p}.w_conn"),
                                        head.w_conn,
                                    ));
                                    leaves.push((
                                        format!("layer{l}.scale{e}.level{k}.head{p}.attn"),
                                        head.attn,
                                    ));
                                    head
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let fusion: Vec<Vec<BoundFusion>> = params
        .fusion
        .iter()
        .enumerate()
        .map(|(k, per_scale)| {
            per_scale
                .iter()
                .enumerate()
                .map(|(e, fh)| {
                    let bound = BoundFusion {
                        map: tape.leaf(&fh.map),
                        bias: tape.leaf(&fh.bias),
                        q: tape.leaf(&fh.q),
                    };
                    leaves.push((format!("fusion.level{k}.scale{e}.map"), bound.map));
                    leaves.push((format!("fusion.level{k}.scale{e}.bias"), bound.bias));
                    leaves.push((format!("fusion.level{k}.scale{e}.q"), bound.q));
                    bound
                })
                .collect()
        })
        .collect();
    let classifier = tape.leaf(&params.classifier);
    leaves.push(("classifier".to_string(), classifier));
    (attention, fusion, classifier, leaves)
}

#[allow(clippy::too_many_arguments)]
fn attention_sublayer(
    tape: &mut Tape,
    adj: &AdjacencyIndex,
    heads: &[BoundHead],
    x_own: TensorId,
    x_up: TensorId,
    cfg: &ModelConfig,
    (layer, scale, level): (usize, usize, usize),
    trace: &mut ForwardTrace,
) -> TensorId {
    let mut outs = Vec::with_capacity(heads.len());
    for (p, h) in heads.iter().enumerate() {
        let s_own = tape.matmul(x_own, h.w_own);
        let s_up = tape.matmul(x_up, h.w_conn);
        let stacked = tape.concat_rows(&[s_own, s_up]);
        let src = tape.gather_rows(s_own, adj.segments.clone());
        let dst = tape.gather_rows(s_own, adj.sources.clone());
        let conn = tape.gather_rows(stacked, adj.connectors.clone());
        let scored = {
            let cat = tape.concat_cols(&[src, dst, conn]);
            tape.matmul(cat, h.attn)
        };
        let zeta = tape.leaky_relu(scored, cfg.leaky_slope);
        let alpha = tape.segment_softmax(zeta, adj.segments.clone(), adj.rows);
        trace.attention.push(AttentionRecord {
            layer,
            scale,
            level,
            head: p,
            alpha,
            segments: adj.segments.clone(),
            segment_count: adj.rows,
        });
        let weighted = tape.mul_col_broadcast(dst, alpha);
        let agg = tape.scatter_add_rows(weighted, adj.segments.clone(), adj.rows);
        outs.push(activate(tape, agg, cfg.activation));
    }
    tape.concat_cols(&outs)
}

/// Scores every hop scale at this level (zero when the scale holds no
/// simplices), softmaxes the scores into mixing weights, and accumulates
/// the weighted branch rows into the global row order.
#[allow(clippy::too_many_arguments)]
fn fuse_level(
    tape: &mut Tape,
    inputs: &ModelInputs,
    fusion: &[BoundFusion],
    branch: &[Vec<TensorId>],
    k: usize,
    cfg: &ModelConfig,
    layer: usize,
    trace: &mut ForwardTrace,
) -> TensorId {
    let eta_count = branch.len();
    let scores: Vec<TensorId> = (0..eta_count)
        .map(|e| {
            let z = branch[e][k];
            if tape.shape(z).0 == 0 {
                tape.zeros(1, 1)
            } else {
                let f = &fusion[e];
                let mapped = tape.matmul(z, f.map);
                let shifted = tape.add_row_broadcast(mapped, f.bias);
                let squashed = tape.tanh(shifted);
                let scored = tape.matmul(squashed, f.q);
                tape.mean_all(scored)
            }
        })
        .collect();
    let stacked = tape.concat_rows(&scores);
    let beta = tape.segment_softmax(stacked, Rc::new(vec![0; eta_count]), 1);
    trace.fusion.push(FusionRecord { layer, level: k, beta });

    let mut fused = tape.zeros(inputs.tau[k], cfg.hidden);
    for (e, per_scale) in branch.iter().enumerate() {
        if tape.shape(per_scale[k]).0 == 0 {
            continue;
        }
        let beta_e = tape.gather_rows(beta, Rc::new(vec![e]));
        let scaled = tape.scale_scalar(per_scale[k], beta_e);
        let scattered =
            tape.scatter_add_rows(scaled, inputs.membership[k][e].clone(), inputs.tau[k]);
        fused = tape.add(fused, scattered);
    }
    fused
}

fn activate(tape: &mut Tape, x: TensorId, act: Activation) -> TensorId {
    match act {
        Activation::Elu => tape.elu(x),
        Activation::Tanh => tape.tanh(x),
    }
}

/// Inverted dropout on whole entries: survivors are scaled by 1/(1-p) so
/// the expectation is unchanged. A no-op at rate zero.
fn dropped(tape: &mut Tape, x: TensorId, rate: f64, rng: &mut ChaCha8Rng) -> TensorId {
    if rate == 0.0 {
        return x;
    }
    let (r, c) = tape.shape(x);
    let keep = 1.0 / (1.0 - rate);
    let mask: Vec<f64> = (0..r * c)
        .map(|_| {
            if rng.random::<f64>() < rate {
                0.0
            } else {
                keep
            }
        })
        .collect();
    tape.mul_const_mask(x, Rc::new(mask))
}
