// Each test binary pulls in its own copy and uses a different subset.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use sgat_autodiff::Matrix;
use sgat_core::synthetic::{random_hetero, SyntheticSpec};
use sgat_core::{
    save_dataset, Edge, HeteroGraph, LiftConfig, SimplicialComplexBundle, Splits,
};
use sgat_harness::{ExperimentConfig, SweepGrid, TrainParams, Variant};
use sgat_model::{Activation, ModelConfig, SGATParams};
use sgat_oracle::{FusionParams, HeadParams, RawActivation, RawParams};

/// Three targets around one hub: 3 vertices, 3 edges, 1 triangle.
pub fn stats_toy() -> HeteroGraph {
    let edges = (0..3).map(|t| Edge { src: t, dst: 3, etype: 0 }).collect();
    HeteroGraph::new(
        vec![0, 0, 0, 1],
        vec!["target".into(), "hub".into()],
        vec!["link".into()],
        vec!["a".into(), "b".into()],
        edges,
        (0..4).map(|i| Some(vec![i as f64, 1.0 - i as f64])).collect(),
        0,
        vec![Some(0), Some(1), Some(0), None],
        Splits { train: vec![0, 1, 2], val: vec![], test: vec![] },
    )
    .unwrap()
}

/// Two 3-target hub cliques with class-aligned features; linearly separable.
/// `three_way` carves out val {2} and test {5}, otherwise everything trains.
pub fn separable(three_way: bool) -> HeteroGraph {
    let mut edges: Vec<Edge> = (0..3).map(|t| Edge { src: t, dst: 6, etype: 0 }).collect();
    edges.extend((3..6).map(|t| Edge { src: t, dst: 7, etype: 0 }));
    let feats = |i: usize| {
        let j = 0.02 * i as f64;
        Some(if i >= 6 {
            vec![0.5, 0.5]
        } else if i < 3 {
            vec![1.0 + j, j]
        } else {
            vec![j, 1.0 + j]
        })
    };
    let splits = if three_way {
        Splits { train: vec![0, 1, 3, 4], val: vec![2], test: vec![5] }
    } else {
        Splits { train: (0..6).collect(), val: vec![], test: vec![] }
    };
    HeteroGraph::new(
        vec![0, 0, 0, 0, 0, 0, 1, 1],
        vec!["target".into(), "hub".into()],
        vec!["link".into()],
        vec!["a".into(), "b".into()],
        edges,
        (0..8).map(feats).collect(),
        0,
        (0..8)
            .map(|i| if i < 3 { Some(0) } else if i < 6 { Some(1) } else { None })
            .collect(),
        splits,
    )
    .unwrap()
}

/// Disjoint copies of a 12-target/1-hub block. Every pair and triple within
/// a block shares the hub, so each copy contributes an identical full-clique
/// complex and total adjacency size scales exactly with the copy count.
pub fn hub_clique_copies(copies: usize) -> HeteroGraph {
    let block = 13u32;
    let mut node_types = Vec::new();
    let mut edges = Vec::new();
    let mut feats = Vec::new();
    let mut labels = Vec::new();
    let mut train = Vec::new();
    for c in 0..copies as u32 {
        let base = c * block;
        for t in 0..12u32 {
            let id = base + t;
            node_types.push(0);
            edges.push(Edge { src: id, dst: base + 12, etype: 0 });
            let x = id as f64;
            feats.push(Some(vec![
                (0.37 * x).sin(),
                (0.11 * x).cos(),
                0.05 * (t as f64) - 0.3,
                if t % 2 == 0 { 0.8 } else { -0.8 },
            ]));
            labels.push(Some(t % 2));
            train.push(id);
        }
        node_types.push(1);
        feats.push(Some(vec![0.1, 0.2, 0.3, 0.4]));
        labels.push(None);
    }
    HeteroGraph::new(
        node_types,
        vec!["target".into(), "hub".into()],
        vec!["link".into()],
        vec!["even".into(), "odd".into()],
        edges,
        feats,
        0,
        labels,
        Splits { train, val: vec![], test: vec![] },
    )
    .unwrap()
}

pub fn write_dataset(dir: &Path, g: &HeteroGraph) {
    save_dataset(g, dir).unwrap();
}

/// A ready-to-train in-memory configuration; the data path is unused by
/// `prepare_graph`-based tests.
pub fn test_config(lift: LiftConfig, model: ModelConfig, seed: u64, epochs: usize) -> ExperimentConfig {
    ExperimentConfig {
        variant: if lift.ef_enabled { Variant::SgatEf } else { Variant::Sgat },
        out: PathBuf::from("unused"),
        data_path: PathBuf::from("unused"),
        randomize_features: None,
        sweep: SweepGrid { epsilon: vec![1], lambda: vec![lift.lambda] },
        lift,
        model,
        train: TrainParams {
            lr: 0.005,
            weight_decay: 5e-4,
            epochs,
            patience: None,
            seed,
            repeats: 1,
        },
    }
}

pub fn lift_cfg(k_max: usize, eta_max: usize, lambda: usize) -> LiftConfig {
    LiftConfig {
        k_max,
        eta_max,
        epsilon: vec![vec![1; k_max]; eta_max],
        lambda,
        ef_enabled: false,
    }
}

pub fn small_model() -> ModelConfig {
    ModelConfig {
        hidden: 16,
        heads: 2,
        layers: 2,
        fusion_dim: 8,
        ..Default::default()
    }
}

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
        ef_enabled: ef,
        ..lift_cfg(k_max, eta_max, lambda)
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
