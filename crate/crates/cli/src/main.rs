//! Command-line front end: signal decomposition, synthetic data generation,
//! cross-validated training, hyperparameter search, ablation tables, and
//! checkpoint evaluation.
//!
//! Exit codes: 0 success, 1 runtime/data failure, 2 usage/config failure.

mod commands;
mod config;
mod out;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sigmode_core::error::Error;

use config::RunConfig;
use out::{ManifestTimer, OutDir};

#[derive(Parser)]
#[command(name = "sigmode", version, about = "Signal-mode decomposition and sequence classification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory receiving all artifacts of this run.
    #[arg(long, global = true, default_value = "out")]
    output: PathBuf,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for fold and particle evaluation. Outputs are
    /// identical for any value.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a CSV column into band-limited modes.
    Decompose {
        /// One-column CSV, or use --column to pick from a wider file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        column: Option<String>,
        /// Number of modes K.
        #[arg(long)]
        modes: Option<usize>,
    },
    /// Generate a synthetic cohort CSV plus its schema JSON.
    Synth {
        #[arg(long)]
        rows: Option<usize>,
        /// Class-1 mean shift in noise standard deviations.
        #[arg(long)]
        separation: Option<f64>,
        #[arg(long)]
        positive_rate: Option<f64>,
        #[arg(long)]
        missing_rate: Option<f64>,
        #[arg(long)]
        outlier_rate: Option<f64>,
    },
    /// K-fold cross-validated training with fixed hyperparameters.
    Train {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Hyperparameter search, then a full retrain at the best candidate.
    Optimize {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Train and evaluate architecture variants under identical folds.
    Ablate {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma-separated variant names; defaults to all registered.
        #[arg(long, value_delimiter = ',')]
        variants: Option<Vec<String>>,
    },
    /// Score a labeled CSV with a saved checkpoint.
    Evaluate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
}

fn run(cli: &Cli) -> sigmode_core::error::Result<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = OutDir::create(&cli.output)?;
    let command_name = match &cli.command {
        Command::Decompose { .. } => "decompose",
        Command::Synth { .. } => "synth",
        Command::Train { .. } => "train",
        Command::Optimize { .. } => "optimize",
        Command::Ablate { .. } => "ablate",
        Command::Evaluate { .. } => "evaluate",
    };
    let timer = ManifestTimer::start(command_name, cli.config.as_deref());

    match &cli.command {
        Command::Decompose { input, column, modes } => {
            commands::decompose::run(&cfg, &out, input, column.as_deref(), *modes)?
        }
        Command::Synth {
            rows,
            separation,
            positive_rate,
            missing_rate,
            outlier_rate,
        } => commands::synth::run(
            &cfg,
            &out,
            &commands::synth::SynthOverrides {
                rows: *rows,
                separation: *separation,
                positive_rate: *positive_rate,
                missing_rate: *missing_rate,
                outlier_rate: *outlier_rate,
            },
        )?,
        Command::Train { input } => {
            commands::train::run(&cfg, &out, input.as_deref(), cli.threads)?
        }
        Command::Optimize { input } => {
            commands::optimize::run(&cfg, &out, input.as_deref(), cli.threads)?
        }
        Command::Ablate { input, variants } => commands::ablate::run(
            &cfg,
            &out,
            input.as_deref(),
            variants.as_deref(),
            cli.threads,
        )?,
        Command::Evaluate { checkpoint, input } => {
            commands::evaluate::run(&cfg, &out, checkpoint, input)?
        }
    }

    timer.finish(&out, cfg.seed, cli.threads)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
