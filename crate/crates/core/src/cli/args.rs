use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "memoryflow",
    version,
    about = "Nonlocal-in-time diffusion experiments",
    args_override_self = true
)]
pub struct Cli {
    /// Flat `key = value` file; keys are flag names. Command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<String>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: String,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    Normalized,
    Caputo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    Nonlocal,
    Local,
    Fractional,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scalar MSD trajectory with local slope and crossover time.
    Msd(MsdArgs),
    /// Dump the memory-operator weights.
    Weights(WeightsArgs),
    /// Bounded-domain field solve.
    Solve(SolveArgs),
    /// Free-space fundamental solution on an x grid.
    Fundamental(FundamentalArgs),
    /// Peak value u(0,t) with both asymptotes.
    Peak(PeakArgs),
    /// Monte Carlo trapping walk.
    Walk(WalkArgs),
    /// Nonlocal, local and fractional solves side by side.
    Compare(SolveArgs),
    /// Canned parameter sets for the figures.
    Reproduce(ReproduceArgs),
    /// Re-run an experiment from its manifest.
    Rerun(RerunArgs),
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct KernelArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = KernelChoice::Normalized)]
    pub kernel: KernelChoice,
    /// Tabulated kernel CSV with header `s,rho` (overrides alpha/kernel).
    #[arg(long, value_name = "PATH")]
    pub kernel_file: Option<String>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MsdArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    /// Time step; defaults to delta/128.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Final time; defaults to 200 delta.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    /// zero | affine:K | step:H,T_ON,T_OFF | step (default placement)
    #[arg(long, default_value = "zero", allow_hyphen_values = true)]
    pub history: String,
    /// Constant right-hand side.
    #[arg(long, default_value_t = 2.0)]
    pub rhs: f64,
    /// Moving-average window for the local slope.
    #[arg(long, default_value_t = 5)]
    pub smoothing: usize,
    /// Crossover threshold as a fraction of the way from alpha to 1.
    #[arg(long, default_value_t = 0.5)]
    pub threshold_level: f64,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct WeightsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[arg(long)]
    pub tau: f64,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = ModelChoice::Nonlocal)]
    pub model: ModelChoice,
    /// Intervals per axis.
    #[arg(long = "N", default_value_t = 200)]
    #[serde(rename = "N")]
    pub n: usize,
    /// Domain per axis as `a:b`.
    #[arg(long, default_value = "0:1", allow_hyphen_values = true)]
    pub domain: String,
    #[arg(long)]
    pub tau: f64,
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t_end: f64,
    /// Comma-separated snapshot times; defaults to T.
    #[arg(long, value_delimiter = ',')]
    pub record: Vec<f64>,
    /// dirac:X[,Y] | dirac-ring | file:PATH
    #[arg(long, default_value = "dirac:0.5", allow_hyphen_values = true)]
    pub history: String,
    #[arg(long, default_value_t = 1.0)]
    pub diffusivity: f64,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct FundamentalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    /// `a:b:n` evenly spaced points.
    #[arg(long, default_value = "-2:2:81", allow_hyphen_values = true)]
    pub x_grid: String,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.1,0.5",
        allow_hyphen_values = true
    )]
    pub times: Vec<f64>,
    /// Contour nodes.
    #[arg(long, default_value_t = 64)]
    pub nq: usize,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PeakArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value_t = 1e-6)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1e3)]
    pub t_max: f64,
    /// Log-spaced sample count.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[arg(long, default_value_t = 64)]
    pub nq: usize,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct WalkArgs {
    #[arg(long, default_value_t = 0.75)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long)]
    pub tau: f64,
    #[arg(long, default_value_t = 100_000)]
    pub particles: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4")]
    pub times: Vec<f64>,
    /// auto | h=VALUE
    #[arg(long, default_value = "auto")]
    pub calibrate: String,
    /// Particle ranges; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReproduceArgs {
    /// fig1 | fig2a | fig3 | fig4 | fig5 | fig6 | fig7 | fig8
    pub figure: String,
}

#[derive(Clone, Debug, Args)]
pub struct RerunArgs {
    /// Path to a manifest.ini written by an earlier run.
    pub manifest: String,
    /// Fail unless the new outputs match the recorded checksums.
    #[arg(long)]
    pub verify: bool,
}
