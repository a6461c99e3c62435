use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

/// Simulation, likelihood and local-asymptotics toolkit for the CIR process
/// dX = (a - bX) dt + sqrt(2 sigma X) dB.
#[derive(Debug, Parser)]
#[command(name = "cirlan", version)]
pub struct Cli {
    /// Config file; the `[section]` named after the subcommand supplies
    /// defaults for its flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a path and write it as `t,x` CSV.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Tabulate the transition density over a grid of end points.
    #[command(args_override_self = true)]
    Density(DensityArgs),
    /// Estimate (a, b) from a `t,x` series with sigma known.
    #[command(args_override_self = true)]
    Estimate(EstimateArgs),
    /// Compare sampled log-likelihood ratios with their limit law.
    #[command(args_override_self = true)]
    Lan(LanArgs),
    /// Check time averages and stationary moments on one long path.
    #[command(args_override_self = true)]
    Ergodic(ErgodicArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DriftArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SeedArgs {
    /// Base seed; falls back to CIRLAN_SEED.
    #[arg(long, env = "CIRLAN_SEED")]
    pub seed: u64,
    /// Stream offset within the seed.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Destination of the command's main output (stdout if absent or `-`).
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Write the report as a single-line JSON object.
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true", action = ArgAction::Set)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Euler,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub drift: DriftArgs,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    pub method: Method,
    /// Euler sub-steps per observation.
    #[arg(long, default_value_t = 1)]
    pub substeps: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub drift: DriftArgs,
    /// Starting state.
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: f64,
    /// Lower end of the grid; defaults to `mean - sds * sd` (at least 0+).
    #[arg(long, allow_negative_numbers = true)]
    pub y_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y_max: Option<f64>,
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
    /// Half-width of the default grid in conditional standard deviations.
    #[arg(long, default_value_t = 12.0)]
    pub sds: f64,
    /// Use the b = 0 density regardless of b.
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true", action = ArgAction::Set)]
    pub force_critical: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// `t,x` CSV series.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: f64,
    /// Also maximise the exact likelihood, started from the discretized estimate.
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true", action = ArgAction::Set)]
    pub exact: bool,
    #[arg(long, default_value_t = 1e-7)]
    pub xtol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LanArgs {
    #[command(flatten)]
    pub drift: DriftArgs,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    /// Local direction for a.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub u: f64,
    /// Local direction for b.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub v: f64,
    #[arg(long, default_value_t = 2000)]
    pub m: usize,
    /// Limit-law draws (critical and supercritical regimes).
    #[arg(long, default_value_t = 2000)]
    pub m_limit: usize,
    /// Grid points of the auxiliary process per limit draw.
    #[arg(long, default_value_t = 256)]
    pub substeps: usize,
    #[command(flatten)]
    pub seed: SeedArgs,
    /// Override the rate for a (negative controls).
    #[arg(long)]
    pub phi1: Option<f64>,
    /// Override the rate for b (negative controls).
    #[arg(long)]
    pub phi2: Option<f64>,
    #[arg(long, default_value_t = 1.63)]
    pub ks_constant: f64,
    /// Largest log-ratio variance at which the unit-mean gate applies.
    #[arg(long, default_value_t = 6.0)]
    pub unit_mean_max_var: f64,
    /// Tolerance of the advisory scheme warnings.
    #[arg(long, default_value_t = 0.5)]
    pub warn_tol: f64,
    /// Write the raw samples as `source,index,loglr` CSV.
    #[arg(long, value_name = "FILE")]
    pub dump: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ErgodicArgs {
    #[command(flatten)]
    pub drift: DriftArgs,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub delta: f64,
    #[command(flatten)]
    pub seed: SeedArgs,
    /// Leading fraction of the path dropped before the tail moments.
    #[arg(long, default_value_t = 0.1)]
    pub burn_in: f64,
    #[arg(long, default_value_t = 0.02)]
    pub avg_tol: f64,
    #[arg(long, default_value_t = 0.05)]
    pub var_tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}
