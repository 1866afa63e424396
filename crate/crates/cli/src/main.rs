use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod answer;
mod bench;
mod craft;
mod gen;
mod graph;
mod io;

/// Counterfactual reasoning over perceived scenes with causal graphs.
#[derive(Debug, Parser)]
#[command(name = "crcg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate scenes with perception noise and ground-truth sidecars.
    Gen(gen::GenArgs),
    /// Build the causal graph of a scene and print its relations.
    Graph(graph::GraphArgs),
    /// Answer a counterfactual query about a scene.
    Answer(answer::AnswerArgs),
    /// Score the naive, approx and full pipelines.
    Bench(bench::BenchArgs),
    /// Turn a text description (and question) into facts.
    CraftParse(craft::ParseArgs),
    /// Answer a text question through the completion service.
    CraftAnswer(craft::AnswerArgs),
}

/// Noise and smoothing settings shared by generation, answering and
/// benchmarking.
#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    /// Standard deviation of perceived positions.
    #[arg(long)]
    pub sigma_p: Option<f64>,
    /// Probability that a perceived state is missing.
    #[arg(long)]
    pub p_drop: Option<f64>,
    /// Scale of simulator noise.
    #[arg(long)]
    pub sigma_s: Option<f64>,
    /// Disable every noise source.
    #[arg(long, conflicts_with_all = ["sigma_p", "p_drop", "sigma_s"])]
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable inputs, malformed documents.
    Config(anyhow::Error),
    /// A scene or query that cannot be scored or answered.
    Scoring(anyhow::Error),
}

impl Failure {
    pub fn config(e: impl Into<anyhow::Error>) -> Self {
        Failure::Config(e.into())
    }

    pub fn scoring(e: impl Into<anyhow::Error>) -> Self {
        Failure::Scoring(e.into())
    }
}

pub type CmdResult = Result<(), Failure>;

pub fn write_out(path: Option<&PathBuf>, text: &str) -> CmdResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::config(anyhow::anyhow!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen::run(a),
        Command::Graph(a) => graph::run(a),
        Command::Answer(a) => answer::run(a),
        Command::Bench(a) => bench::run(a),
        Command::CraftParse(a) => craft::parse(a),
        Command::CraftAnswer(a) => craft::answer(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Scoring(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
