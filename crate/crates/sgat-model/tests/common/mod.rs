// Each test binary pulls in its own copy and uses a different subset.
#![allow(dead_code)]

use sgat_autodiff::Matrix;
use sgat_core::synthetic::{random_hetero, SyntheticSpec};
use sgat_core::{Edge, HeteroGraph, LiftConfig, SimplicialComplexBundle, Splits};
use sgat_model::{Activation, ModelConfig, SGATParams};
use sgat_oracle::{FusionParams, HeadParams, RawActivation, RawParams};

pub fn small_graph(seed: u64) -> HeteroGraph {
    random_hetero(
        &SyntheticSpec {
            target_count: 7,
            hub_count: 5,
            second_tier_count: 3,
            edge_prob: 0.35,
            second_prob: 0.4,
            feature_dim: 3,
            class_count: 2,
        },
        seed,
    )
}

/// Hand-wired graph whose lift populates every level at both hop scales, with
/// off-diagonal adjacency everywhere attention runs. Targets 0-5 share hubs
/// 6-9 in overlapping triples; leaf nodes 10 (behind hub 6) and 11 (behind
/// hub 8) are the only distance-2 neighbors, splitting the targets into two
/// clusters at the second scale.
pub fn dense_toy_graph() -> HeteroGraph {
    let hub_members: [(u32, [u32; 3]); 4] =
        [(6, [0, 1, 2]), (7, [1, 2, 3]), (8, [3, 4, 5]), (9, [4, 5, 0])];
    let mut edges = Vec::new();
    for (hub, members) in hub_members {
        for t in members {
            edges.push(Edge { src: t, dst: hub, etype: 0 });
        }
    }
    edges.push(Edge { src: 6, dst: 10, etype: 1 });
    edges.push(Edge { src: 8, dst: 11, etype: 1 });

    let node_types = vec![0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2];
    let feats: Vec<Option<Vec<f64>>> = (0..node_types.len())
        .map(|i| {
            let x = i as f64;
            Some(vec![0.3 + 0.11 * x, -0.5 + 0.07 * x, 0.2 - 0.045 * x])
        })
        .collect();
    let labels: Vec<Option<u32>> = node_types
        .iter()
        .enumerate()
        .map(|(i, ty)| (*ty == 0).then_some(i as u32 % 2))
        .collect();
    HeteroGraph::new(
        node_types,
        vec!["target".into(), "hub".into(), "leaf".into()],
        vec!["member".into(), "tail".into()],
        vec!["a".into(), "b".into()],
        edges,
        feats,
        0,
        labels,
        Splits { train: (0..6).collect(), val: vec![], test: vec![] },
    )
    .unwrap()
}

pub fn lift(
    g: &HeteroGraph,
    k_max: usize,
    eta_max: usize,
    lambda: usize,
    ef: bool,
) -> SimplicialComplexBundle {
    let cfg = LiftConfig {
        k_max,
        eta_max,
        epsilon: vec![vec![1; k_max]; eta_max],
        lambda,
        ef_enabled: ef,
    };
    SimplicialComplexBundle::build(g, &cfg).unwrap()
}

pub fn mat_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows).map(|r| m.row(r).to_vec()).collect()
}

/// Exports the fast-path parameters into the dense reference's plain
/// nested-vector form.
pub fn to_raw(params: &SGATParams, cfg: &ModelConfig) -> RawParams {
    RawParams {
        leaky_slope: cfg.leaky_slope,
        activation: match cfg.activation {
            Activation::Elu => RawActivation::Elu,
            Activation::Tanh => RawActivation::Tanh,
        },
        attention: params
            .attention
            .iter()
            .map(|per_scale| {
                per_scale
                    .iter()
                    .map(|per_level| {
                        per_level
                            .iter()
                            .map(|heads| {
                                heads
                                    .iter()
                                    .map(|h| HeadParams {
                                        w_own: mat_rows(&h.w_own),
                                        w_conn: mat_rows(&h.w_conn),
                                        attn: h.attn.data.clone(),
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect(),
        fusion: params
            .fusion
            .iter()
            .map(|per_scale| {
                per_scale
                    .iter()
                    .map(|f| FusionParams {
                        map: mat_rows(&f.map),
                        bias: f.bias.data.clone(),
                        q: f.q.data.clone(),
                    })
                    .collect()
            })
            .collect(),
        classifier: mat_rows(&params.classifier),
    }
}
