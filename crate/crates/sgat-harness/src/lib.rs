//! Experiment harness: configuration, deterministic training with
//! validation-based selection, F1 metrics, sensitivity sweeps and the `sgat`
//! command-line tool.

pub mod cli;
pub mod config;
pub mod error;
pub mod metrics;
pub mod report;
pub mod sweep;
pub mod train;

pub use config::{ExperimentConfig, Overrides, SweepGrid, TrainParams, Variant};
pub use error::HarnessError;
pub use metrics::{evaluate_f1, predictions};
pub use report::{
    Aggregate, ComplexStats, EpochRecord, ExperimentReport, LevelStats, RunReport, ScaleStats,
};
pub use sweep::{sweep, write_sweep_csv, SweepRow};
pub use train::{
    prepare, prepare_graph, run_experiment, split_metrics, train_prepared, ExperimentOutcome,
    PreparedData, TrainedRun,
};
