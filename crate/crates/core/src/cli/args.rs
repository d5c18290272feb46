use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "brwss",
    version,
    about = "First passage times of a branching random walk on the b-ary hypercube",
    args_override_self = true
)]
pub struct Cli {
    /// `key = value` file of default flags; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regime predictions of the first passage time.
    Predict(PredictArgs),
    /// Monte Carlo ensemble of first passage or cover times.
    Simulate(SimulateArgs),
    /// Smirnov scaling table of the empirical-process ballot probability.
    Ballot(BallotArgs),
    /// CSV data behind the figures.
    Figures(FiguresArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Predict(_) => "predict",
            Command::Simulate(_) => "simulate",
            Command::Ballot(_) => "ballot",
            Command::Figures(_) => "figures",
        }
    }
}

/// Names of the subcommands, used to locate where config flags go.
pub const SUBCOMMANDS: [&str; 4] = ["predict", "simulate", "ballot", "figures"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeChoice {
    Auto,
    Slow,
    Fast,
    Ultraslow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeChoice {
    Projected,
    Full,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Alphabet size.
    #[arg(long, default_value_t = 2)]
    pub b: u32,
    /// Genome length.
    #[arg(long)]
    pub d: usize,
    /// Branching rate.
    #[arg(long, conflicts_with = "rho")]
    pub lambda1: Option<f64>,
    /// Mutation rate (default 1).
    #[arg(long, conflicts_with = "rho")]
    pub lambda2: Option<f64>,
    /// Growth parameter exp(lambda1 / lambda2), with lambda2 = 1.
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Start distance.
    #[arg(long, conflicts_with = "m_range")]
    pub m: Option<usize>,
    /// Inclusive range of start distances, `lo:hi`.
    #[arg(long, value_name = "LO:HI")]
    pub m_range: Option<String>,
    /// Sweep of rho values, `lo:hi` or `lo:hi:count` (default 31 points).
    #[arg(long, value_name = "LO:HI[:COUNT]", conflicts_with_all = ["rho", "lambda1", "lambda2"])]
    pub rho_range: Option<String>,
    #[arg(long, value_enum, default_value_t = RegimeChoice::Auto)]
    pub regime: RegimeChoice,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Report times in original units (divided by lambda2).
    #[arg(long)]
    pub raw_time: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Start distance from the target (ignored with --cover).
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1000)]
    pub replicas: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Time horizon as a multiple of the regime prediction.
    #[arg(long, default_value_t = crate::simulator::DEFAULT_HORIZON_MULTIPLE)]
    pub t_max_mult: f64,
    /// Population cap; a branch beyond it censors the replica.
    #[arg(long, default_value_t = crate::simulator::DEFAULT_POPULATION_CAP)]
    pub pop_cap: u64,
    #[arg(long, value_enum, default_value_t = ModeChoice::Projected)]
    pub mode: ModeChoice,
    /// Cover times instead of first passage times (full mode).
    #[arg(long)]
    pub cover: bool,
    /// Report times in original units instead of rescaled ones.
    #[arg(long)]
    pub raw_time: bool,
    /// Directory for samples.csv and stats.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BallotArgs {
    /// Comma-separated sample counts.
    #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
    pub n_grid: Vec<usize>,
    /// Comma-separated boundary levels.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub lambda_grid: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub replicas: u64,
    /// Largest n for which the exact recursion is evaluated.
    #[arg(long, default_value_t = crate::ballot::EXACT_MAX_N)]
    pub exact_max_n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FiguresArgs {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Genome length for the rho sweep of fig2.csv.
    #[arg(long, default_value_t = 1000)]
    pub fig2_d: usize,
}
