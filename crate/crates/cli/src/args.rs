use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "sun-phase",
    version,
    about = "Phase/modulus identities for SU(n) matrix elements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Group-manifold relations for |grad eta|^2, |grad log sqrt p|^2 and grad p . grad eta.
    VerifySurel(SurelArgs),
    /// Ray-space relations on the coset section, plus the group/coset bridge.
    VerifyCprel(CprelArgs),
    /// SU(2) closed-form grid in polar coordinates.
    Su2Demo(DemoArgs),
    /// Local frequency along a one-parameter subgroup.
    Superosc(SuperoscArgs),
    /// Phase winding around a closed loop.
    Vortex(VortexArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChartKind {
    Exp,
    Su2Polar,
    Cartan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairKind {
    Random,
    PaperSu2,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    /// Left-invariant frame contraction.
    Vielbein,
    /// Central differences of the phase and log-modulus.
    Fd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    Aligned,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LoopKind {
    /// Polar chart: phi from 0 to 2 pi at fixed chi, theta.
    Phi,
    /// Circle in a coordinate plane of the chosen chart.
    Circle,
}

/// State-pair selection shared by every command.
#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    #[arg(long, value_enum, default_value_t = PairKind::Random)]
    pub pair: PairKind,
    /// Components "re:im,re:im,..." of the initial state (explicit pairs).
    #[arg(long, allow_hyphen_values = true)]
    pub psi_i: Option<String>,
    /// Components of the final state (explicit pairs).
    #[arg(long, allow_hyphen_values = true)]
    pub psi_f: Option<String>,
}

/// Options common to report-producing commands.
#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override a check tolerance: NAME=VALUE (repeatable).
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Include per-point records in the report.
    #[arg(long)]
    pub detail: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SurelArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ChartKind::Exp)]
    pub chart: ChartKind,
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Backend::Vielbein)]
    pub backend: Backend,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CprelArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coset points are drawn uniformly from the ball |y| < radius.
    #[arg(long, default_value_t = 1.5)]
    pub radius: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    /// Cells per axis.
    #[arg(long, default_value_t = 20)]
    pub grid: usize,
    /// Grid CSV destination.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SuperoscArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = GeneratorKind::Aligned)]
    pub generator: GeneratorKind,
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    pub t_max: f64,
    /// Trace CSV destination (t, re, im, omega).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VortexArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ChartKind::Su2Polar)]
    pub chart: ChartKind,
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "loop", value_enum, default_value_t = LoopKind::Phi)]
    pub loop_kind: LoopKind,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub chi: f64,
    #[arg(long, default_value_t = 0.1)]
    pub theta: f64,
    /// Circle centre as comma-separated chart coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    /// Coordinate indices "i,j" spanning the circle's plane.
    #[arg(long, default_value = "1,2")]
    pub plane: String,
    #[arg(long, default_value_t = 0.3)]
    pub radius: f64,
    #[arg(long, default_value_t = 64)]
    pub segments: usize,
    /// Traverse the loop backwards.
    #[arg(long)]
    pub reverse: bool,
    /// Expected winding number, added as a check.
    #[arg(long, allow_hyphen_values = true)]
    pub expect: Option<i64>,
    #[command(flatten)]
    pub output: OutputArgs,
}
