use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

#[derive(Debug, Parser)]
#[command(
    name = "playscore",
    version,
    about = "Per-action contribution scoring for MOBA matches"
)]
pub struct Cli {
    /// Seed for generation, splitting, initialization and shuffling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Flat key = value configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory every output is written into.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Abort on the first invalid input instead of skipping it.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic match files plus the latent-value sidecar.
    Synth {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        events_min: Option<usize>,
        #[arg(long)]
        events_max: Option<usize>,
        #[arg(long)]
        label_flip: Option<f64>,
    },
    /// Parse a directory of match files into a line-delimited dataset.
    Featurize {
        input: PathBuf,
        /// File name inside the output directory.
        #[arg(long, default_value = "dataset.jsonl")]
        output: String,
    },
    /// Split a dataset, train one variant, and write the best checkpoint.
    Train {
        dataset: PathBuf,
        #[arg(long)]
        variant: Option<u8>,
        #[arg(long)]
        epochs: Option<u32>,
        #[arg(long)]
        lr: Option<f64>,
    },
    /// Print per-action scores for one match file.
    Score {
        checkpoint: PathBuf,
        match_file: PathBuf,
        /// Machine-readable output.
        #[arg(long)]
        csv: bool,
        /// Winning team, required by outcome-encoded variants.
        #[arg(long)]
        outcome: Option<String>,
    },
    /// Discernment, baselines, ranking comparison and PCA study for a dataset.
    Evaluate {
        checkpoint: PathBuf,
        dataset: PathBuf,
        #[arg(long)]
        threshold: Option<usize>,
    },
    /// Finite-difference check of every variant's full training gradient.
    Gradcheck {
        /// Random instances per variant.
        #[arg(long, default_value_t = 1)]
        instances: usize,
        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
