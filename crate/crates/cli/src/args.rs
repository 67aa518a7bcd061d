use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "gausscap",
    version,
    about = "Capacities and degradability witnesses for one-mode Gaussian dilations"
)]
pub struct Cli {
    /// Flat TOML file with default settings (see README).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; GAUSSCAP_JOBS takes precedence.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed forms, optimized bounds and uncertainty bounds on a q grid.
    Capacity(CapacityArgs),
    /// Tables behind the c(q) and min c(q) plots.
    Figures(FigureArgs),
    /// Gaussian against truncated-Fock output entropies.
    Crosscheck(CrosscheckArgs),
    /// Non-degradability witness for a beam splitter or amplifier.
    Witness(WitnessArgs),
    /// Runs the acceptance criteria and prints one line per criterion.
    Acceptance(AcceptanceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2,
    All,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    /// Comma-separated q values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub q: Option<Vec<f64>>,
    /// Grid `start:stop:step`, both ends included.
    #[arg(long)]
    pub q_range: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Input energy P_A.
    #[arg(long)]
    pub pa: Option<f64>,
    /// Environment energy P_E.
    #[arg(long)]
    pub pe: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FigureArgs {
    #[arg(long, value_enum)]
    pub which: Option<Figure>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Largest Fock index in the min c scan.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CrosscheckArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Fock cutoff per mode.
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Thermal input photon numbers.
    #[arg(long, value_delimiter = ',')]
    pub nbar: Option<Vec<f64>>,
    /// Environment squeezing parameters.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub s: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct WitnessArgs {
    /// Beam-splitter transmissivity (q < 1) or rational gain (q > 1).
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// Amplifier gain `x/y`.
    #[arg(long)]
    pub rational: Option<String>,
    /// Offsets q' − x/y to try, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct AcceptanceArgs {
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<u8>>,
}
