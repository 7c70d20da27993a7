mod commands;
mod config;
mod trials;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::Config;

/// Simulated CONGEST runs of replacement-path algorithms.
#[derive(Parser, Debug)]
#[command(name = "congest-dso", version)]
struct Cli {
    /// `key = value` file supplying defaults for the numeric flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random graph in the `n m` / `u v w` text format.
    Generate(GenerateArgs),
    /// Preprocess a graph and print the cost ledger.
    Preprocess(PreprocessArgs),
    /// Answer a query file and print one CSV row per query.
    Query(QueryArgs),
    /// Compute the all-pairs second simple shortest path table.
    Apsisp(ApsispArgs),
    /// Compare an algorithm with the centralized oracles on random graphs.
    Verify(VerifyArgs),
    /// Measure rounds and congestion; prints CSV rows.
    Bench(BenchArgs),
    /// Build a lower-bound graph family and print a JSON-lines manifest.
    Lowerbound(LowerboundArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct SimFlags {
    /// Seed for every randomized step.
    #[arg(long)]
    seed: Option<u64>,
    /// `faithful` simulates every SSSP; `charged` bills each one a fixed cost.
    #[arg(long)]
    mode: Option<String>,
    /// Words per link direction per round.
    #[arg(long)]
    bandwidth: Option<usize>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    max_weight: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Allow graphs whose underlying undirected graph is disconnected.
    #[arg(long)]
    any: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Oracle {
    Fastquery,
    Fastpre,
}

#[derive(Args, Debug)]
struct PreprocessArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    algo: Oracle,
    #[command(flatten)]
    sim: SimFlags,
    #[command(flatten)]
    sampling: SamplingFlags,
}

#[derive(Args, Debug, Clone, Default)]
struct SamplingFlags {
    /// Source-sampling constant of the fast-preprocessing oracle.
    #[arg(long)]
    c: Option<f64>,
    /// Graph-sampling constant of the fast-preprocessing oracle.
    #[arg(long)]
    c_g: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Answerer {
    Fastquery,
    Fastpre,
    /// One SSSP per query, no preprocessing.
    General,
    /// One multi-source computation for a batch sharing its failed edge.
    Seb,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Lines `x y u v`.
    #[arg(long)]
    queries: PathBuf,
    #[arg(long, value_enum)]
    algo: Answerer,
    /// Add a column naming the case that produced each answer.
    #[arg(long)]
    case: bool,
    /// Also write the cost ledger as CSV.
    #[arg(long)]
    ledger: Option<PathBuf>,
    #[command(flatten)]
    sim: SimFlags,
    #[command(flatten)]
    sampling: SamplingFlags,
}

#[derive(Args, Debug)]
struct ApsispArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    ledger: Option<PathBuf>,
    #[command(flatten)]
    sim: SimFlags,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Exclude,
    Fastquery,
    Fastpre,
    General,
    Seb,
    Apsisp,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    max_weight: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Queries (or exclude sources) per trial.
    #[arg(long)]
    k: Option<usize>,
    /// Tolerated fraction of inexact answers for the fast-preprocessing oracle.
    #[arg(long)]
    allowance: Option<f64>,
    #[command(flatten)]
    sim: SimFlags,
    #[command(flatten)]
    sampling: SamplingFlags,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    max_weight: Option<u64>,
    /// Batch sizes: `a..b` steps by factors of four, or a comma list.
    #[arg(long)]
    k: Option<String>,
    #[command(flatten)]
    sim: SimFlags,
    #[command(flatten)]
    sampling: SamplingFlags,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Fig1,
    Fig2,
}

#[derive(Args, Debug)]
struct LowerboundArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Vertex budget; the family is sized to fit.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    bits_seed: Option<u64>,
    /// Edges per gadget link in the second family.
    #[arg(long)]
    stretch: Option<usize>,
    /// Orient the second family's edges towards the sink.
    #[arg(long)]
    directed: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<congest_dso::Error> for CliError {
    fn from(e: congest_dso::Error) -> Self {
        match e {
            congest_dso::Error::InvalidParameters(msg) => CliError::Usage(msg),
            other => CliError::Data(other.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => Config::parse(&commands::read_text(path)?)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Generate(a) => commands::generate(&cfg, a),
        Command::Preprocess(a) => commands::preprocess(&cfg, a),
        Command::Query(a) => commands::query(&cfg, a),
        Command::Apsisp(a) => commands::apsisp(&cfg, a),
        Command::Verify(a) => commands::verify(&cfg, a),
        Command::Bench(a) => commands::bench(&cfg, a),
        Command::Lowerbound(a) => commands::lowerbound(&cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
