//! Experiment configuration: one TOML file with `[data]`, `[lift]`,
//! `[model]`, `[train]` and an optional `[sweep]` section, plus a top-level
//! model variant and output directory. Command-line `--seed`, `--data` and
//! `--out` override the file.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sgat_core::LiftConfig;
use sgat_model::ModelConfig;

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Sgat,
    SgatEf,
}

impl Variant {
    /// The EF variant augments 1-simplex features with path edge summaries.
    pub fn edge_features(self) -> bool {
        matches!(self, Variant::SgatEf)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Sgat => "sgat",
            Variant::SgatEf => "sgat-ef",
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_variant")]
    variant: Variant,
    out: Option<PathBuf>,
    #[serde(default)]
    data: DataSection,
    lift: LiftSection,
    #[serde(default)]
    model: ModelConfig,
    #[serde(default)]
    train: TrainSection,
    sweep: Option<SweepSection>,
}

fn default_variant() -> Variant {
    Variant::Sgat
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DataSection {
    path: Option<PathBuf>,
    /// Replace every node feature with a standard normal draw (feature
    /// ablation); the value is the generator seed.
    randomize_features: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct LiftSection {
    k_max: usize,
    eta_max: usize,
    /// `epsilon[eta-1][k-1]`, same layout as the lift itself.
    epsilon: Vec<Vec<u32>>,
    lambda: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TrainSection {
    lr: f64,
    weight_decay: f64,
    epochs: usize,
    patience: Option<usize>,
    seed: Option<u64>,
    repeats: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            lr: 0.005,
            weight_decay: 5e-4,
            epochs: 200,
            patience: None,
            seed: None,
            repeats: 1,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SweepSection {
    epsilon: Vec<u32>,
    lambda: Vec<usize>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            epsilon: (1..=5).collect(),
            lambda: Vec::new(),
        }
    }
}

/// Optimizer and schedule settings with the seed resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    pub lr: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    /// Stop after this many epochs without a new best validation score.
    pub patience: Option<usize>,
    pub seed: u64,
    pub repeats: usize,
}

/// Grid for the sensitivity sweep: level-1 thresholds crossed with caps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepGrid {
    pub epsilon: Vec<u32>,
    pub lambda: Vec<usize>,
}

/// A fully resolved experiment: file contents merged with CLI overrides and
/// validated.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub out: PathBuf,
    pub data_path: PathBuf,
    pub randomize_features: Option<u64>,
    pub lift: LiftConfig,
    pub model: ModelConfig,
    pub train: TrainParams,
    pub sweep: SweepGrid,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path, ov: &Overrides) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let raw: RawConfig = toml::from_str(&text).map_err(|e| HarnessError::ConfigParse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::resolve(raw, ov)
    }

    fn resolve(raw: RawConfig, ov: &Overrides) -> Result<Self, HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));

        let seed = match ov.seed.or(raw.train.seed) {
            Some(s) => s,
            None => return bad("a seed is required: set [train].seed or pass --seed".into()),
        };
        let data_path = match ov.data.clone().or(raw.data.path) {
            Some(p) => p,
            None => return bad("a dataset is required: set [data].path or pass --data".into()),
        };
        if !data_path.is_dir() {
            return bad(format!(
                "dataset directory `{}` does not exist",
                data_path.display()
            ));
        }
        let out = ov
            .out
            .clone()
            .or(raw.out)
            .unwrap_or_else(|| PathBuf::from("out"));

        let lift = LiftConfig {
            k_max: raw.lift.k_max,
            eta_max: raw.lift.eta_max,
            epsilon: raw.lift.epsilon,
            lambda: raw.lift.lambda,
            ef_enabled: raw.variant.edge_features(),
        };
        lift.validate()?;
        raw.model.validate()?;

        let t = raw.train;
        if t.lr < 0.0 || !t.lr.is_finite() {
            return bad(format!("learning rate {} must be finite and >= 0", t.lr));
        }
        if t.weight_decay < 0.0 || !t.weight_decay.is_finite() {
            return bad(format!("weight decay {} must be finite and >= 0", t.weight_decay));
        }
        if t.epochs == 0 {
            return bad("epochs must be at least 1".into());
        }
        if t.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }

        let sweep = raw.sweep.unwrap_or_default();
        let sweep = SweepGrid {
            epsilon: sweep.epsilon,
            lambda: if sweep.lambda.is_empty() {
                vec![lift.lambda]
            } else {
                sweep.lambda
            },
        };
        if sweep.epsilon.is_empty() {
            return bad("sweep epsilon grid is empty".into());
        }
        if sweep.epsilon.contains(&0) {
            return bad("sweep epsilon values must be >= 1".into());
        }

        Ok(Self {
            variant: raw.variant,
            out,
            data_path,
            randomize_features: raw.data.randomize_features,
            lift,
            model: raw.model,
            train: TrainParams {
                lr: t.lr,
                weight_decay: t.weight_decay,
                epochs: t.epochs,
                patience: t.patience,
                seed,
                repeats: t.repeats,
            },
            sweep,
        })
    }
}
