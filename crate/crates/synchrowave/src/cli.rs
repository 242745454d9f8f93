//! Subcommand implementations behind the `synchrowave` binary.
//!
//! Exit codes are a stable contract:
//! 0 success, 1 check failure, 2 usage/configuration, 3 I/O,
//! 4 numeric failure, 5 partial sweep failure.

use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::config::{resolve_seed, CliConfig};
use crate::dataset::{
    load_differential_dataset, save_json, DifferentialDataset, RawDataset,
};
use crate::error::Error;
use crate::sim::{generate_dataset, generate_raw_dataset};
use crate::sweep::{load_raw_results, render_report, run_sweep, SweepOutcome};
use crate::training::{
    run_gradient_check, save_checkpoint, train_data_only, train_piml_known, train_piml_unknown,
    write_training_log, Checkpoint, GradCheckCase, TrainedModel,
};
use crate::waveform::{split_events, test_mse, DifferentialEvent};

/// Learn inverter transient current response from synchro-waveform
/// disturbance events, with a physics-informed option.
#[derive(Debug, Parser)]
#[command(name = "synchrowave", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic disturbance dataset.
    Generate(GenerateArgs),
    /// Train one model on an existing dataset.
    Train(TrainArgs),
    /// Run the full sweep over sizes, rates, and regimes.
    Sweep(SweepArgs),
    /// Re-render report artifacts from stored raw results.
    Report(ReportArgs),
    /// Verify analytic gradients against finite differences.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Configuration file (JSON); defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Destination for the differential dataset.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Generator seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of events.
    #[arg(long)]
    pub events: Option<usize>,
    /// Samples per grid cycle.
    #[arg(long)]
    pub rate: Option<usize>,
    /// Disturbance amplitude range in volts.
    #[arg(long, num_args = 2, value_names = ["LOW", "HIGH"])]
    pub amplitude: Option<Vec<f64>>,
    /// Also write the raw waveform dataset (with pre-history) alongside.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset file to train on.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Objective: data | phys | phys-learn.
    #[arg(long, value_parser = ["data", "phys", "phys-learn"])]
    pub mode: String,
    /// Physics weight (ignored for --mode data).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Training events to use.
    #[arg(long)]
    pub train_count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for the checkpoint and training log.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory for the results tree.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Generate per-rate datasets when their files are missing.
    #[arg(long)]
    pub generate: bool,
    /// Overwrite an existing output directory.
    #[arg(long)]
    pub force: bool,
    /// Worker threads for sweep cells.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Results directory holding raw_results.csv.
    #[arg(long)]
    pub results: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.3)]
    pub lambda: f64,
    /// Deliberately corrupt one gradient coordinate (negative control).
    #[arg(long, hide = true)]
    pub sabotage: bool,
}

/// Command failure carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Argument(_) | Error::Structure(_) | Error::Data(_) | Error::Json(_) => 2,
            Error::Io(_) => 3,
            Error::Numeric(_) => 4,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = std::result::Result<(), CliError>;

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Train(args) => cmd_train(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Report(args) => cmd_report(args),
        Command::Gradcheck(args) => cmd_gradcheck(args),
    }
}

fn load_config(path: Option<&Path>) -> std::result::Result<(CliConfig, Option<String>), CliError> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError {
                code: 2,
                message: format!("cannot read config {}: {e}", p.display()),
            })?;
            let cfg = CliConfig::from_json(&text)?;
            Ok((cfg, Some(text)))
        }
        None => Ok((CliConfig::default(), None)),
    }
}

fn cmd_generate(args: GenerateArgs) -> CliResult {
    let (mut cfg, text) = load_config(args.config.as_deref())?;
    if let Some(events) = args.events {
        cfg.disturbance.event_count = events;
    }
    if let Some(rate) = args.rate {
        cfg.sampling.samples_per_cycle = rate;
    }
    if let Some(amp) = &args.amplitude {
        cfg.disturbance.amplitude_range = (amp[0], amp[1]);
    }
    cfg.disturbance.seed = resolve_seed(
        args.seed,
        text.as_deref(),
        "disturbance",
        cfg.disturbance.seed,
    );
    if let Some(out) = args.out {
        cfg.paths.dataset_path = out;
    }
    cfg.validate()?;

    let sampling = cfg.sampling.to_sampling()?;
    let line = cfg.line.to_line()?;
    let events = generate_dataset(&cfg.disturbance, &cfg.ibr, &line, &sampling)?;
    let dataset = DifferentialDataset::from_events(sampling, Some(line), &events);
    save_json(&cfg.paths.dataset_path, &dataset)?;
    println!(
        "wrote {} events ({} samples/cycle, n={}) to {}",
        dataset.events.len(),
        sampling.samples_per_cycle,
        sampling.samples_per_event,
        cfg.paths.dataset_path.display()
    );

    if args.raw {
        let raw_events = generate_raw_dataset(&cfg.disturbance, &cfg.ibr, &line, &sampling)?;
        let raw = RawDataset::from_events(sampling, Some(line), raw_events);
        let raw_path = cfg.paths.dataset_path.with_extension("raw.json");
        save_json(&raw_path, &raw)?;
        println!("wrote raw waveforms to {}", raw_path.display());
    }

    let meta_path = cfg.paths.dataset_path.with_extension("meta.json");
    save_meta(&meta_path, &cfg)?;
    Ok(())
}

fn save_meta(path: &Path, cfg: &CliConfig) -> CliResult {
    std::fs::write(path, cfg.to_pretty_json()).map_err(|e| CliError {
        code: 3,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn load_events(path: &Path) -> std::result::Result<Vec<DifferentialEvent>, CliError> {
    if !path.exists() {
        return Err(CliError {
            code: 2,
            message: format!("dataset {} does not exist (run `generate` first)", path.display()),
        });
    }
    Ok(load_differential_dataset(path)?.into_events()?)
}

fn cmd_train(args: TrainArgs) -> CliResult {
    let (mut cfg, text) = load_config(args.config.as_deref())?;
    if let Some(dataset) = args.dataset {
        cfg.paths.dataset_path = dataset;
    }
    cfg.train.seed = resolve_seed(args.seed, text.as_deref(), "train", cfg.train.seed);
    cfg.validate()?;

    let events = load_events(&cfg.paths.dataset_path)?;
    let train_count = args.train_count.unwrap_or(20);
    let split = split_events(
        events.len(),
        train_count,
        cfg.sweep.val_count,
        cfg.sweep.test_count,
        cfg.train.seed,
    )?;
    let lambda = args.lambda.unwrap_or(0.3);
    let line = cfg.line.to_line()?;

    let trained: TrainedModel = match args.mode.as_str() {
        "data" => train_data_only(&events, &split, &cfg.train)?,
        "phys" => train_piml_known(&events, &split, line, lambda, &cfg.train)?,
        "phys-learn" => train_piml_unknown(&events, &split, lambda, &cfg.train)?,
        other => {
            return Err(CliError {
                code: 2,
                message: format!("unknown mode {other:?}"),
            })
        }
    };

    let preds = trained.predict(&events, &split.test_ids)?;
    let mse = test_mse(&preds, &events, &split.test_ids)?;
    println!("final train loss: {}", trained.final_train_loss);
    println!("validation MSE:   {}", trained.final_val_mse);
    println!("test MSE:         {mse}");
    if let (crate::training::TrainMode::PhysLearnable, Some(p)) =
        (trained.mode, trained.line_params)
    {
        println!("learned R: {} ohm", p.resistance);
        println!("learned L: {} H", p.inductance);
    }

    let out_dir = args.out_dir.unwrap_or_else(|| cfg.paths.output_dir.clone());
    std::fs::create_dir_all(&out_dir).map_err(Error::from)?;
    let tag = format!("{}_{}ev_seed{}", trained.mode, train_count, cfg.train.seed);
    save_checkpoint(
        &out_dir.join(format!("checkpoint_{tag}.json")),
        &Checkpoint::from_trained(&trained),
    )?;
    write_training_log(&out_dir.join(format!("training_log_{tag}.csv")), &trained.log)?;
    save_meta(&out_dir.join("effective_config.json"), &cfg)?;
    println!("checkpoint and log written to {}", out_dir.display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> CliResult {
    let (mut cfg, _text) = load_config(args.config.as_deref())?;
    if let Some(out) = args.out {
        cfg.paths.output_dir = out;
    }
    cfg.validate()?;
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError {
                code: 2,
                message: format!("cannot configure {jobs} worker threads: {e}"),
            })?;
    }

    let out_dir = cfg.paths.output_dir.clone();
    if out_dir.exists() && !args.force {
        return Err(CliError {
            code: 2,
            message: format!(
                "output directory {} exists; pass --force to overwrite",
                out_dir.display()
            ),
        });
    }
    if out_dir.exists() {
        std::fs::remove_dir_all(&out_dir).map_err(Error::from)?;
    }

    let line = cfg.line.to_line()?;
    let mut datasets: BTreeMap<usize, Vec<DifferentialEvent>> = BTreeMap::new();
    for &rate in &cfg.sweep.samples_per_cycle {
        let path = cfg.dataset_path_for_rate(rate);
        if path.exists() {
            datasets.insert(rate, load_events(&path)?);
        } else if args.generate {
            let sampling = cfg.sampling.at_rate(rate)?;
            let mut disturbance = cfg.disturbance;
            disturbance.event_count = cfg.sweep.event_count;
            let events = generate_dataset(&disturbance, &cfg.ibr, &line, &sampling)?;
            let dataset = DifferentialDataset::from_events(sampling, Some(line), &events);
            save_json(&path, &dataset)?;
            datasets.insert(rate, events);
        } else {
            return Err(CliError {
                code: 2,
                message: format!(
                    "dataset {} for rate {rate} missing; pass --generate or run `generate`",
                    path.display()
                ),
            });
        }
    }

    let outcome: SweepOutcome = run_sweep(&cfg.sweep, &cfg.train, line, &datasets)?;
    render_report(&outcome, &out_dir, Some(&cfg.to_pretty_json()))?;
    print_summary(&out_dir)?;
    if outcome.any_failed() {
        let failed = outcome.cells.iter().filter(|c| c.outcome.is_err()).count();
        return Err(CliError {
            code: 5,
            message: format!("{failed} sweep cells failed; see raw_results.csv"),
        });
    }
    Ok(())
}

fn print_summary(out_dir: &Path) -> CliResult {
    let summary = std::fs::read_to_string(out_dir.join("summary.md")).map_err(Error::from)?;
    println!("{summary}");
    Ok(())
}

fn cmd_report(args: ReportArgs) -> CliResult {
    let (cfg, _text) = load_config(args.config.as_deref())?;
    let dir = args.results.unwrap_or_else(|| cfg.paths.output_dir.clone());
    let raw = dir.join("raw_results.csv");
    if !raw.exists() {
        return Err(CliError {
            code: 2,
            message: format!("{} not found; run `sweep` first", raw.display()),
        });
    }
    let cells = load_raw_results(&raw)?;
    let outcome = SweepOutcome {
        cells,
        trajectories: Vec::new(),
    };
    render_report(&outcome, &dir, None)?;
    print_summary(&dir)?;
    Ok(())
}

fn cmd_gradcheck(args: GradcheckArgs) -> CliResult {
    let mut worst: f64 = 0.0;
    for learnable in [false, true] {
        let report = run_gradient_check(&GradCheckCase {
            seed: args.seed,
            lambda: args.lambda,
            learnable_line: learnable,
            sabotage: args.sabotage,
            ..GradCheckCase::default()
        })?;
        println!(
            "seed {} lambda {} learnable {}: max relative error {:.3e} over {} parameters",
            args.seed, args.lambda, learnable, report.max_relative_error, report.parameter_count
        );
        worst = worst.max(report.max_relative_error);
    }
    if worst < 1e-4 {
        println!("gradient check passed (worst {worst:.3e} < 1e-4)");
        Ok(())
    } else {
        Err(CliError {
            code: 1,
            message: format!("gradient check failed: {worst:.3e} >= 1e-4"),
        })
    }
}
