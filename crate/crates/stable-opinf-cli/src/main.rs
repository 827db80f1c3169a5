//! Command-line pipeline for learning quadratic control systems with
//! bounded-input bounded-state guarantees.
//!
//! Exit codes: 0 on success, 1 when a certification or validation check
//! fails, 2 for I/O, parse, or configuration errors.

mod commands;
mod config;
mod pipeline;

use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;
use pipeline::RunDir;

#[derive(Parser, Debug)]
#[command(
    name = "stable-opinf",
    version,
    about = "Learn quadratic control systems from trajectory data, with \
             bounded-input bounded-state stability by construction",
    long_about = "Pipeline stages: `simulate` generates ground-truth trajectory data, \
                  `pod`/`diff` expose snapshot compression and differentiation for ad-hoc \
                  use, `learn` fits an unconstrained least-squares model and a \
                  stability-certified model, `certify` re-checks a saved model's \
                  certificate, and `eval` tabulates test-trajectory errors against the \
                  ground truth."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate the configured ground truth under every train/test signal
    Simulate(RunArgs),
    /// Fit a reduced basis to the stored training snapshots
    Pod(RunArgs),
    /// Write derivative CSVs (stencil or exact) for stored trajectories
    Diff(RunArgs),
    /// Prepare data and fit both learners; write models and certificates
    Learn(RunArgs),
    /// Check the stability certificate of a saved model
    Certify(commands::certify::CertifyArgs),
    /// Compare learned models against ground truth on the test signals
    Eval(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiment configuration (flat key = value TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate(args) => with_run(&args, commands::simulate::run),
        Command::Pod(args) => with_run(&args, commands::pod::run),
        Command::Diff(args) => with_run(&args, commands::diff::run),
        Command::Learn(args) => with_run(&args, commands::learn::run),
        Command::Certify(args) => commands::certify::run(&args),
        Command::Eval(args) => with_run(&args, commands::eval::run),
    }
}

/// Loads the config, applies `--seed`/`--out` overrides, and opens the run
/// directory for the command body.
fn with_run(args: &RunArgs, body: fn(&ExperimentConfig, &RunDir) -> Result<i32>) -> Result<i32> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.to_string_lossy().into_owned();
    }
    config.validate()?;
    let run_dir = RunDir::create(Path::new(&config.out_dir))?;
    body(&config, &run_dir)
}
