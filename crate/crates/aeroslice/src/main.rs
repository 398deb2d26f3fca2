use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aeroslice::harness::{
    evaluate_checkpoint, run_suite, train_and_checkpoint, HarnessError, ScenarioConfig, Suite,
};

/// Resource control for network slices serving layered air corridors.
#[derive(Parser)]
#[command(name = "aeroslice", version)]
struct Cli {
    /// Scenario file (TOML). Omitted: the built-in desk preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Replace the scenario's seed list with a single seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Episodes per run.
    #[arg(long, global = true)]
    episodes: Option<usize>,
    /// Steps per episode.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Directory for metric files and checkpoints [default: out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment suite: compare_algorithms, pairing_ablation,
    /// preassess_ablation or velocity_sweep.
    Run { suite: String },
    /// Train the cooperative learner and save one actor checkpoint per slice.
    Train,
    /// Roll saved actors through the scenario without exploration.
    Evaluate {
        /// Directory holding actor checkpoints written by `train`.
        checkpoint: PathBuf,
    },
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::desk(),
    };
    cfg.apply_overrides(cli.seed, cli.episodes, cli.steps);
    cfg.validate()?;
    let out = cli.out.unwrap_or_else(|| PathBuf::from("out"));
    let summary = match cli.command {
        Command::Run { suite } => run_suite(Suite::from_name(&suite)?, &cfg, &out)?,
        Command::Train => train_and_checkpoint(&cfg, &out)?,
        Command::Evaluate { checkpoint } => evaluate_checkpoint(&cfg, &checkpoint, &out)?,
    };
    println!(
        "{}: {} runs, metrics in {}",
        summary.suite,
        summary.runs.len(),
        out.display()
    );
    Ok(())
}
