use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use regsos::solver::{PrecondKind, SolverConfig};
use serde::Serialize;

/// Environment variable read for the default worker count.
pub const THREADS_ENV: &str = "REGSOS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "regsos", version, about = "Sum-of-squares bounds for polynomial optimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build, solve and extract minimizers; writes a JSON report.
    Solve(SolveArgs),
    /// Stability number of a graph through the Motzkin-Straus quartic.
    Stability(StabilityArgs),
    /// Build the SDP only and write it with its sidecar.
    Build(BuildArgs),
    /// Sampled upper estimate of the minimum, for cross-checking bounds.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// `min f` over all of R^n.
    Unconstrained,
    /// `min f` over the unit sphere; f must be a form.
    Homogeneous,
    /// `min f` subject to `g_i ≥ 0` (dense Lasserre hierarchy).
    Constrained,
    /// Like `constrained`, with clique-wise blocks.
    Sparse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    NewtonCg,
    Bpm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Precond {
    Exact,
    Diag,
    None,
}

impl From<Precond> for PrecondKind {
    fn from(p: Precond) -> Self {
        match p {
            Precond::Exact => PrecondKind::Exact,
            Precond::Diag => PrecondKind::Diag,
            Precond::None => PrecondKind::None,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Objective in the polynomial text format.
    #[arg(long)]
    pub poly: PathBuf,
    /// Constraints `g_i ≥ 0`, one polynomial per `---` separated section.
    #[arg(long)]
    pub constraints: Option<PathBuf>,
    /// Relaxation order for constrained and sparse problems.
    #[arg(long)]
    pub order: Option<u32>,
    /// Cliques for sparse problems, one per line, 1-indexed variables.
    #[arg(long)]
    pub cliques: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "newton-cg")]
    pub method: Method,
    #[arg(long, value_enum, default_value = "exact")]
    pub precond: Precond,
    #[arg(long, default_value_t = 1e-6)]
    pub eps_in: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub eps_out: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma0: f64,
    #[arg(long, default_value_t = 5.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 1e6)]
    pub sigma_max: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 500)]
    pub cg_cap: usize,
    #[arg(long, default_value_t = 25)]
    pub max_inner: usize,
    #[arg(long, default_value_t = 20)]
    pub max_outer: usize,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            eps_in: self.eps_in,
            eps_out: self.eps_out,
            delta: self.delta,
            rho: self.rho,
            sigma0: self.sigma0,
            sigma_max: self.sigma_max,
            cg_cap: self.cg_cap,
            max_inner: self.max_inner,
            max_outer: self.max_outer,
            precond: self.precond.into(),
            ..SolverConfig::default()
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Seed for every random choice (extraction, sampling).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to $REGSOS_THREADS, then to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave the wall time out of the report so reruns compare equal.
    #[arg(long)]
    pub no_timing: bool,
    /// Skip the local Newton polish of extracted points.
    #[arg(long)]
    pub no_refine: bool,
    /// Relative eigenvalue threshold for numerical rank.
    #[arg(long, default_value_t = regsos::extract::DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
}

#[derive(Clone, Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Clone, Debug, Args)]
pub struct StabilityArgs {
    /// First line `n`, then one edge `u v` per line, 1-indexed.
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Clone, Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Problem file; the sidecar goes next to it as `<stem>.meta.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub poly: PathBuf,
    #[arg(long)]
    pub constraints: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Number of best samples polished by coordinate descent.
    #[arg(long, default_value_t = 20)]
    pub starts: usize,
    /// Standard deviation of the Gaussian draws for unconstrained problems.
    #[arg(long, default_value_t = 3.0)]
    pub scale: f64,
    /// Half-width of the sampling box for constrained problems.
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
