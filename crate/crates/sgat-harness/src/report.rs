//! Machine-readable run artifacts: complex statistics, per-epoch curves and
//! the aggregated experiment report.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sgat_core::{gamma_ratio, SimplicialComplexBundle};

use crate::error::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: usize,
    pub simplices: usize,
    /// Stored entries of the upper adjacency, self-loops included. The top
    /// level has no upper neighbors and stores no adjacency.
    pub nnz: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleStats {
    pub eta: usize,
    pub levels: Vec<LevelStats>,
    /// Triangles per edge at this hop scale.
    pub gamma: f64,
}

/// Size summary of a lifted complex, per hop scale and for the cross-scale
/// union.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexStats {
    pub scales: Vec<ScaleStats>,
    /// Union simplex count per level.
    pub global_simplices: Vec<usize>,
    pub global_gamma: f64,
}

impl ComplexStats {
    pub fn from_bundle(bundle: &SimplicialComplexBundle) -> Self {
        let scales = bundle
            .per_eta
            .iter()
            .map(|ec| ScaleStats {
                eta: ec.eta,
                levels: (0..ec.levels.len())
                    .map(|k| LevelStats {
                        level: k,
                        simplices: ec.levels[k].len(),
                        nnz: ec.adjacency.get(k).map(|a| a.nnz()),
                    })
                    .collect(),
                gamma: gamma_ratio(&ec.levels),
            })
            .collect();
        let global_simplices: Vec<usize> =
            bundle.global.iter().map(|g| g.simplices.len()).collect();
        let edges = global_simplices.get(1).copied().unwrap_or(0);
        let tris = global_simplices.get(2).copied().unwrap_or(0);
        let global_gamma = if edges == 0 {
            0.0
        } else {
            tris as f64 / edges as f64
        };
        Self {
            scales,
            global_simplices,
            global_gamma,
        }
    }

    /// Total stored adjacency entries across levels and scales.
    pub fn total_nnz(&self) -> usize {
        self.scales
            .iter()
            .flat_map(|s| s.levels.iter().filter_map(|l| l.nnz))
            .sum()
    }

    /// Plain-text rendering used by the `stats` subcommand.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for sc in &self.scales {
            let _ = write!(s, "eta {}:", sc.eta);
            for l in &sc.levels {
                let _ = write!(s, " |chi^{}|={}", l.level, l.simplices);
            }
            for l in &sc.levels {
                if let Some(nnz) = l.nnz {
                    let _ = write!(s, " ||A^{}||={nnz}", l.level);
                }
            }
            let _ = writeln!(s, " gamma={:.3}", sc.gamma);
        }
        let _ = write!(s, "global:");
        for (k, n) in self.global_simplices.iter().enumerate() {
            let _ = write!(s, " |chi^{k}|={n}");
        }
        let _ = writeln!(s, " gamma={:.3}", self.global_gamma);
        s
    }
}

/// One epoch of the training curve. Validation columns are absent when the
/// dataset has no validation split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_micro_f1: f64,
    pub val_macro_f1: Option<f64>,
    pub val_micro_f1: Option<f64>,
    pub seconds: f64,
}

/// Outcome of one seeded training run, reported at the selected epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub variant: String,
    pub seed: u64,
    pub classes: usize,
    pub epochs_run: usize,
    /// 1-based epoch whose parameters were selected.
    pub best_epoch: usize,
    pub best_val_macro_f1: Option<f64>,
    pub test_macro_f1: Option<f64>,
    pub test_micro_f1: Option<f64>,
    pub curves: Vec<EpochRecord>,
    pub stats: ComplexStats,
}

/// Mean and population standard deviation of the test metrics across the
/// repeated seeds; absent when the dataset has no test split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub repeats: usize,
    pub test_macro_f1_mean: Option<f64>,
    pub test_macro_f1_std: Option<f64>,
    pub test_micro_f1_mean: Option<f64>,
    pub test_micro_f1_std: Option<f64>,
}

/// Everything `train` writes into `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub runs: Vec<RunReport>,
    pub aggregate: Aggregate,
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl Aggregate {
    pub fn over(runs: &[RunReport]) -> Self {
        let collect = |f: fn(&RunReport) -> Option<f64>| -> Option<Vec<f64>> {
            runs.iter().map(f).collect()
        };
        let (mut ma_mean, mut ma_std, mut mi_mean, mut mi_std) = (None, None, None, None);
        if let Some(v) = collect(|r| r.test_macro_f1) {
            let (m, s) = mean_std(&v);
            (ma_mean, ma_std) = (Some(m), Some(s));
        }
        if let Some(v) = collect(|r| r.test_micro_f1) {
            let (m, s) = mean_std(&v);
            (mi_mean, mi_std) = (Some(m), Some(s));
        }
        Self {
            repeats: runs.len(),
            test_macro_f1_mean: ma_mean,
            test_macro_f1_std: ma_std,
            test_micro_f1_mean: mi_mean,
            test_micro_f1_std: mi_std,
        }
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Serialize {
        what: path.display().to_string(),
        message: e.to_string(),
    })?;
    fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Columns: epoch,train_loss,train_micro_f1,val_macro_f1,val_micro_f1,seconds.
pub fn write_curves_csv(path: &Path, curves: &[EpochRecord]) -> Result<(), HarnessError> {
    let mut s = String::from("epoch,train_loss,train_micro_f1,val_macro_f1,val_micro_f1,seconds\n");
    for c in curves {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            c.epoch,
            c.train_loss,
            c.train_micro_f1,
            opt(c.val_macro_f1),
            opt(c.val_micro_f1),
            c.seconds
        );
    }
    fs::write(path, s).map_err(|e| HarnessError::io(path, e))
}
