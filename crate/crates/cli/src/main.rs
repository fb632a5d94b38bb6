//! `hypertv`: ingest tables, run semi-supervised learning, cluster and
//! evaluate cuts. Every command prints one JSON document.

mod cluster;
mod cut;
mod ingest;
mod output;
mod ssl;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hypertv::Error),
    #[error("{path}: {msg}")]
    Input { path: String, msg: String },
    #[error("{0}")]
    Usage(String),
    /// Output was written but some solve stopped early.
    #[error("{0}")]
    NotConverged(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Input {
            path: path.display().to_string(),
            msg: e.to_string(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(hypertv::Error::NotConverged(_)) | CliError::NotConverged(_) => "not-converged",
            CliError::Core(_) => "invalid-input",
            CliError::Input { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }

    fn exit_code(&self) -> u8 {
        match self.kind() {
            "not-converged" => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hypertv", version, about = "Total variation on hypergraphs")]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

/// Flags accepted by every command.
#[derive(Debug, Clone, Args)]
pub struct Shared {
    /// Base seed; trial t uses seed + t.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads. 1 gives bit-identical reruns.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Relative duality gap tolerance of the PDHG solves.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub epsilon: f64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a hypergraph from a CSV table.
    Ingest(ingest::IngestArgs),
    /// Semi-supervised classification.
    Ssl(ssl::SslArgs),
    /// Balanced-cut clustering by recursive RatioDCA.
    Cluster(cluster::ClusterArgs),
    /// Cut metrics of a given bipartition.
    Cut(cut::CutArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.shared.threads == 0 {
        return Err(CliError::Usage("--threads must be >= 1".into()));
    }
    if !(cli.shared.epsilon > 0.0) {
        return Err(CliError::Usage("--epsilon must be > 0".into()));
    }
    match cli.command {
        Command::Ingest(a) => ingest::run(&a, &cli.shared),
        Command::Ssl(a) => ssl::run(&a, &cli.shared),
        Command::Cluster(a) => cluster::run(&a, &cli.shared),
        Command::Cut(a) => cut::run(&a, &cli.shared),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let err = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{err}");
            ExitCode::from(e.exit_code())
        }
    }
}
