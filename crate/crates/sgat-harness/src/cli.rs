//! Command-line interface. Usage problems exit 2 (clap's default); runtime
//! failures exit 1 with the offending path in the message where applicable.

use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sgat_model::SGATParams;

use crate::config::{ExperimentConfig, Overrides};
use crate::report::{write_curves_csv, write_json};
use crate::sweep::{sweep, write_sweep_csv};
use crate::train::{prepare, run_experiment, split_metrics};

#[derive(Debug, Parser)]
#[command(
    name = "sgat",
    version,
    about = "Lift heterogeneous graphs into simplicial complexes and train attention models on them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

/// Flags shared by every subcommand; they override the config file.
#[derive(Debug, Args)]
pub struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Training seed; overrides [train].seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dataset directory; overrides [data].path.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Output directory; overrides the top-level `out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Build the complex and write its statistics to <out>/lift.json.
    Lift(Common),
    /// Train; writes report.json, curves.csv and checkpoint.bin to <out>.
    Train {
        #[command(flatten)]
        common: Common,
        /// Number of seeded repeats (seed, seed+1, ...); overrides
        /// [train].repeats.
        #[arg(long)]
        repeats: Option<usize>,
    },
    /// Evaluate a checkpoint; writes eval.json to <out>.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Parameter file written by `train`.
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Threshold/cap grid; writes sweep.csv to <out>.
    Sweep(Common),
    /// Print simplex counts, adjacency entry counts and gamma per hop scale.
    Stats(Common),
}

#[derive(Serialize)]
struct SplitMetricsOut {
    macro_f1: f64,
    micro_f1: f64,
}

#[derive(Serialize)]
struct EvalReport {
    train: Option<SplitMetricsOut>,
    val: Option<SplitMetricsOut>,
    test: Option<SplitMetricsOut>,
}

/// Training is the only place the seed matters; elsewhere a missing seed
/// must not block read-only inspection.
fn load_config(common: &Common, needs_seed: bool) -> anyhow::Result<ExperimentConfig> {
    let mut ov = Overrides {
        seed: common.seed,
        data: common.data.clone(),
        out: common.out.clone(),
    };
    if !needs_seed {
        ov.seed = ov.seed.or(Some(0));
    }
    Ok(ExperimentConfig::from_file(&common.config, &ov)?)
}

fn out_dir(cfg: &ExperimentConfig) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(&cfg.out)
        .with_context(|| format!("creating output directory `{}`", cfg.out.display()))?;
    Ok(cfg.out.clone())
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.cmd {
        Cmd::Stats(common) => {
            let cfg = load_config(&common, false)?;
            let data = prepare(&cfg)?;
            print!("{}", data.stats.render());
        }
        Cmd::Lift(common) => {
            let cfg = load_config(&common, false)?;
            let data = prepare(&cfg)?;
            let out = out_dir(&cfg)?;
            write_json(&out.join("lift.json"), &data.stats)?;
            print!("{}", data.stats.render());
            println!("wrote {}", out.join("lift.json").display());
        }
        Cmd::Train { common, repeats } => {
            let mut cfg = load_config(&common, true)?;
            if let Some(r) = repeats {
                anyhow::ensure!(r >= 1, "--repeats must be at least 1");
                cfg.train.repeats = r;
            }
            let data = prepare(&cfg)?;
            let outcome = run_experiment(&cfg, &data)?;
            let out = out_dir(&cfg)?;
            write_json(&out.join("report.json"), &outcome.report)?;
            write_curves_csv(&out.join("curves.csv"), &outcome.report.runs[0].curves)?;
            outcome.first_params.save(&out.join("checkpoint.bin"))?;
            for run in &outcome.report.runs {
                println!(
                    "seed {}: best epoch {}/{} test macro {} micro {}",
                    run.seed,
                    run.best_epoch,
                    run.epochs_run,
                    fmt_opt(run.test_macro_f1),
                    fmt_opt(run.test_micro_f1),
                );
            }
            let agg = &outcome.report.aggregate;
            if agg.repeats > 1 {
                println!(
                    "aggregate over {} seeds: test macro {} +/- {} micro {} +/- {}",
                    agg.repeats,
                    fmt_opt(agg.test_macro_f1_mean),
                    fmt_opt(agg.test_macro_f1_std),
                    fmt_opt(agg.test_micro_f1_mean),
                    fmt_opt(agg.test_micro_f1_std),
                );
            }
            println!("wrote report.json, curves.csv, checkpoint.bin to {}", out.display());
        }
        Cmd::Eval { common, checkpoint } => {
            let cfg = load_config(&common, false)?;
            let data = prepare(&cfg)?;
            let mut params = SGATParams::init(&cfg.model, &data.dims, cfg.train.seed);
            params
                .load_into(&checkpoint)
                .with_context(|| format!("loading checkpoint `{}`", checkpoint.display()))?;
            let [train, val, test] = split_metrics(&data, &params, &cfg);
            let to_out = |m: Option<(f64, f64)>| {
                m.map(|(macro_f1, micro_f1)| SplitMetricsOut { macro_f1, micro_f1 })
            };
            let report = EvalReport {
                train: to_out(train),
                val: to_out(val),
                test: to_out(test),
            };
            for (name, m) in [("train", train), ("val", val), ("test", test)] {
                match m {
                    Some((ma, mi)) => println!("{name}: macro {ma} micro {mi}"),
                    None => println!("{name}: (empty split)"),
                }
            }
            let out = out_dir(&cfg)?;
            write_json(&out.join("eval.json"), &report)?;
            println!("wrote {}", out.join("eval.json").display());
        }
        Cmd::Sweep(common) => {
            let cfg = load_config(&common, true)?;
            let rows = sweep(&cfg)?;
            let out = out_dir(&cfg)?;
            write_sweep_csv(&out.join("sweep.csv"), &rows)?;
            let ok = rows.iter().filter(|r| r.status == "ok").count();
            println!(
                "swept {} points ({} ok, {} failed); wrote {}",
                rows.len(),
                ok,
                rows.len() - ok,
                out.join("sweep.csv").display()
            );
        }
    }
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into())
}
