//! Deterministic training with validation-based model selection.
//!
//! One optimization step per epoch over the full train split (the whole
//! complex is one batch). Selection tracks validation macro F1, falling back
//! to train macro F1 when the dataset has no validation split; ties keep the
//! earlier epoch. The selected parameters produce the reported test metrics.

use std::collections::HashMap;
use std::time::Instant;

use sgat_autodiff::{AdamConfig, AdamState, Matrix, Tape};
use sgat_core::{load_dataset, randomize_node_features, HeteroGraph, SimplicialComplexBundle};
use sgat_model::{
    model_forward, model_loss, ForwardOptions, ModelDims, ModelError, ModelInputs, SGATParams,
};

use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::metrics::evaluate_f1;
use crate::report::{Aggregate, ComplexStats, EpochRecord, ExperimentReport, RunReport};

/// A lifted dataset with labels and split members mapped onto global vertex
/// rows, ready to train on.
pub struct PreparedData {
    pub graph: HeteroGraph,
    pub bundle: SimplicialComplexBundle,
    pub inputs: ModelInputs,
    pub dims: ModelDims,
    pub stats: ComplexStats,
    pub labels: Vec<u32>,
    pub train_rows: Vec<usize>,
    pub val_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<PreparedData, HarnessError> {
    let g = load_dataset(&cfg.data_path)?;
    let g = match cfg.randomize_features {
        Some(seed) => randomize_node_features(&g, seed),
        None => g,
    };
    prepare_graph(cfg, g)
}

/// Lift + row bookkeeping for an already loaded graph.
pub fn prepare_graph(
    cfg: &ExperimentConfig,
    graph: HeteroGraph,
) -> Result<PreparedData, HarnessError> {
    let bundle = SimplicialComplexBundle::build(&graph, &cfg.lift)?;
    let inputs = ModelInputs::from_bundle(&bundle);
    let dims = ModelDims::from_bundle(&bundle, graph.class_count());
    let stats = ComplexStats::from_bundle(&bundle);

    let labels: Vec<u32> = inputs
        .vertex_order
        .iter()
        .map(|&v| graph.label(v).expect("target node labeled"))
        .collect();
    let row_of: HashMap<u32, usize> = inputs
        .vertex_order
        .iter()
        .enumerate()
        .map(|(row, &v)| (v, row))
        .collect();
    let to_rows = |ids: &[u32]| -> Vec<usize> {
        ids.iter()
            .map(|id| *row_of.get(id).expect("split node is a vertex"))
            .collect()
    };
    let splits = graph.splits().clone();
    Ok(PreparedData {
        train_rows: to_rows(&splits.train),
        val_rows: to_rows(&splits.val),
        test_rows: to_rows(&splits.test),
        graph,
        bundle,
        inputs,
        dims,
        stats,
        labels,
    })
}

/// One trained run: the report plus the selected parameters.
pub struct TrainedRun {
    pub report: RunReport,
    pub params: SGATParams,
}

fn eval_logits(data: &PreparedData, params: &SGATParams, cfg: &ExperimentConfig) -> Matrix {
    let mut tape = Tape::new();
    let pass = model_forward(
        &mut tape,
        &data.inputs,
        params,
        &cfg.model,
        &ForwardOptions::default(),
    );
    tape.to_matrix(pass.logits)
}

/// Metrics of `params` on every non-empty split, as (macro, micro) pairs in
/// train/val/test order.
pub fn split_metrics(
    data: &PreparedData,
    params: &SGATParams,
    cfg: &ExperimentConfig,
) -> [Option<(f64, f64)>; 3] {
    let logits = eval_logits(data, params, cfg);
    [&data.train_rows, &data.val_rows, &data.test_rows].map(|rows| {
        (!rows.is_empty()).then(|| evaluate_f1(&logits, &data.labels, rows))
    })
}

pub fn train_prepared(
    cfg: &ExperimentConfig,
    data: &PreparedData,
    seed: u64,
) -> Result<TrainedRun, HarnessError> {
    assert!(!data.train_rows.is_empty(), "empty train split");
    let mut params = SGATParams::init(&cfg.model, &data.dims, seed);
    let mut adam = AdamState::new(AdamConfig {
        lr: cfg.train.lr,
        weight_decay: cfg.train.weight_decay,
        ..Default::default()
    });

    let mut curves: Vec<EpochRecord> = Vec::new();
    let mut best: Option<(f64, usize, SGATParams)> = None;
    let mut since_best = 0usize;

    for epoch in 1..=cfg.train.epochs {
        let started = Instant::now();

        let mut tape = Tape::new();
        let opts = ForwardOptions {
            train: true,
            dropout_seed: seed.wrapping_add(epoch as u64),
        };
        let pass = model_forward(&mut tape, &data.inputs, &params, &cfg.model, &opts);
        let loss_id = model_loss(&mut tape, pass.logits, &data.labels, &data.train_rows);
        let train_loss = tape.value(loss_id)[0];
        if !train_loss.is_finite() {
            return Err(HarnessError::Diverged { epoch });
        }
        tape.backward(loss_id);
        let grads: HashMap<&str, &[f64]> = pass
            .param_leaves
            .iter()
            .map(|(name, id)| (name.as_str(), tape.grad(*id)))
            .collect();
        adam.begin_step();
        params.try_visit_mut(&mut |name, m| {
            let g = grads.get(name).expect("every tensor reaches the loss graph");
            adam.apply(name, m, g).map_err(ModelError::from)
        })?;

        let logits = eval_logits(data, &params, cfg);
        let (train_macro, train_micro) = evaluate_f1(&logits, &data.labels, &data.train_rows);
        let val = (!data.val_rows.is_empty())
            .then(|| evaluate_f1(&logits, &data.labels, &data.val_rows));
        let selection_score = val.map_or(train_macro, |v| v.0);

        curves.push(EpochRecord {
            epoch,
            train_loss,
            train_micro_f1: train_micro,
            val_macro_f1: val.map(|v| v.0),
            val_micro_f1: val.map(|v| v.1),
            seconds: started.elapsed().as_secs_f64(),
        });

        if best.as_ref().is_none_or(|(score, _, _)| selection_score > *score) {
            best = Some((selection_score, epoch, params.clone()));
            since_best = 0;
        } else {
            since_best += 1;
            if cfg.train.patience.is_some_and(|p| since_best >= p) {
                break;
            }
        }
    }

    let (best_score, best_epoch, best_params) = best.expect("at least one epoch ran");
    let [_, val, test] = split_metrics(data, &best_params, cfg);
    let report = RunReport {
        variant: cfg.variant.to_string(),
        seed,
        classes: data.graph.class_count(),
        epochs_run: curves.len(),
        best_epoch,
        best_val_macro_f1: val.map(|_| best_score),
        test_macro_f1: test.map(|t| t.0),
        test_micro_f1: test.map(|t| t.1),
        curves,
        stats: data.stats.clone(),
    };
    Ok(TrainedRun {
        report,
        params: best_params,
    })
}

/// All repeats of an experiment plus the artifacts of the first seed.
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    pub first_params: SGATParams,
}

/// Trains `repeats` runs with seeds `seed, seed+1, ...` over one shared lift.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    data: &PreparedData,
) -> Result<ExperimentOutcome, HarnessError> {
    let mut runs = Vec::with_capacity(cfg.train.repeats);
    let mut first_params = None;
    for r in 0..cfg.train.repeats {
        let run = train_prepared(cfg, data, cfg.train.seed.wrapping_add(r as u64))?;
        if first_params.is_none() {
            first_params = Some(run.params);
        }
        runs.push(run.report);
    }
    let aggregate = Aggregate::over(&runs);
    Ok(ExperimentOutcome {
        report: ExperimentReport { runs, aggregate },
        first_params: first_params.expect("repeats >= 1"),
    })
}
