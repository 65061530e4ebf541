use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Bell/CHSH correlators, Tsirelson-bound search, Werner threshold and local
/// hidden-variable simulations.
#[derive(Debug, Parser)]
#[command(name = "bell", version, about)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report to PATH instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Seed for sampling (default 0) and for the optimizer grid offset.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// key = value file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CHSH value of a state for fixed measurement directions.
    Chsh(ChshArgs),
    /// Maximize |S| over all measurement directions.
    Optimize(OptimizeArgs),
    /// Maximal |S| across Werner visibilities, plus the violation threshold.
    WernerSweep(SweepArgs),
    /// Local hidden-variable models: exact correlators, sampling, exhaustive bound.
    Lhv(LhvArgs),
    /// Simulated Born-rule experiment on a state.
    Sample(SampleArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Chsh(_) => "chsh",
            Command::Optimize(_) => "optimize",
            Command::WernerSweep(_) => "werner-sweep",
            Command::Lhv(_) => "lhv",
            Command::Sample(_) => "sample",
        }
    }
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// `singlet` or `werner:<p>` with p in [-1/3, 1].
    #[arg(long)]
    pub state: Option<String>,
}

#[derive(Debug, Args)]
pub struct SettingsArgs {
    /// `optimal` or `aligned`; defaults to `optimal` when no angles are given.
    #[arg(long)]
    pub preset: Option<String>,

    /// Akbar's first direction as polar angles THETA PHI (radians).
    #[arg(long, num_args = 2, value_names = ["THETA", "PHI"], allow_negative_numbers = true)]
    pub a1: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["THETA", "PHI"], allow_negative_numbers = true)]
    pub a2: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["THETA", "PHI"], allow_negative_numbers = true)]
    pub b1: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["THETA", "PHI"], allow_negative_numbers = true)]
    pub b2: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Polar divisions of the coarse search grid.
    #[arg(long)]
    pub grid_theta: Option<usize>,
    /// Azimuthal divisions of the coarse search grid.
    #[arg(long)]
    pub grid_phi: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub settings: SettingsArgs,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// First visibility of the sweep.
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    /// Last visibility of the sweep.
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    /// Number of sweep points (default 41).
    #[arg(long, conflicts_with = "step")]
    pub points: Option<usize>,
    /// Spacing between sweep points, instead of --points.
    #[arg(long)]
    pub step: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct LhvArgs {
    /// Enumerate all 16 deterministic strategies and report the maximal |S|.
    #[arg(long)]
    pub exhaustive: bool,
    /// `uniform16` or `pattern:<i>` (all weight on pattern i).
    #[arg(long)]
    pub preset: Option<String>,
    /// 16 comma-separated pattern weights.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Also simulate this many trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Write the CSV trial log to PATH.
    #[arg(long, value_name = "PATH")]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub settings: SettingsArgs,
    /// Number of trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Write the CSV trial log to PATH.
    #[arg(long, value_name = "PATH")]
    pub log: Option<PathBuf>,
}
