use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "smoothip",
    version,
    about = "Prediction-guided solver for smooth Boolean polynomial programs"
)]
pub struct Cli {
    /// Worker threads for the parallel executor (0 = rayon default).
    #[arg(long, global = true, env = "SMOOTHIP_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Run every stage on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Solve one instance from a prediction.
    Solve(SolveArgs),
    /// Ratio-versus-error sweep over instances with known optima.
    Sweep(SweepArgs),
    /// Print structural diagnostics for an instance.
    Verify(VerifyArgs),
    /// Pick the prediction source with the lowest mean cost.
    Erm(ErmArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Maxcut,
    Maxksat,
    Maxkcsp,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    Maxcut,
    Maxksat,
    Maxkcsp,
    Poly,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyArg {
    Greedy,
    Randomized,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    pub kind: GenKind,
    #[arg(long)]
    pub n: usize,
    /// Edge probability (maxcut).
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Clause or constraint count (defaults to 4n).
    #[arg(long)]
    pub m: Option<usize>,
    /// Clause width or constraint arity.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InstanceArgs {
    /// Override format detection.
    #[arg(long)]
    pub kind: Option<InputKind>,
    /// Extra polynomial constraint `path,L,U` (repeatable).
    #[arg(long = "constraint", value_name = "PATH,L,U")]
    pub constraints: Vec<String>,
}

#[derive(Args, Debug)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = StrategyArg::Greedy)]
    pub strategy: StrategyArg,
    /// `full`, `stride:S`, or a comma list such as `0,5,10`.
    #[arg(long, default_value = "full")]
    pub grid: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tail parameter of the randomized bounds.
    #[arg(long, default_value = "1")]
    pub k: String,
    /// Report wall_ms as 0 for byte-stable output.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub input: InstanceArgs,
    /// `exact`, `perturb:E`, `file:PATH`, or a bare path.
    #[arg(long, default_value = "exact")]
    pub prediction: String,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the JSON report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Write the per-eps CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(required = true)]
    pub instances: Vec<PathBuf>,
    #[command(flatten)]
    pub input: InstanceArgs,
    /// Injected errors: `all` or a comma list.
    #[arg(long, default_value = "all")]
    pub eps: String,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output CSV path; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub input: InstanceArgs,
    /// Known optimum, used when the instance is too large to enumerate.
    #[arg(long)]
    pub opt: Option<String>,
}

#[derive(Args, Debug)]
pub struct ErmArgs {
    #[arg(required = true)]
    pub instances: Vec<PathBuf>,
    #[command(flatten)]
    pub input: InstanceArgs,
    /// Candidate manifest; built-in candidates when absent.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}
