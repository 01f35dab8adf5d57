//! Command-line front end: build, solve, extract and report, plus a sampling
//! oracle for cross-checking bounds.

pub mod args;
pub mod error;
pub mod input;
pub mod oracle;
pub mod pipeline;

use std::io::Write;
use std::path::{Path, PathBuf};

use regsos::extract::ExtractionConfig;

use args::{BuildArgs, Cli, Command, Kind, OracleArgs, RunArgs, SolverArgs, StabilityArgs, THREADS_ENV};
use error::{CliError, CliResult};
use oracle::{Domain, OracleSpec};
use pipeline::RunSettings;

/// Worker count from the flag, else the environment, else all cores.
pub fn resolve_threads(flag: Option<usize>) -> CliResult<usize> {
    if let Some(t) = flag {
        if t == 0 {
            return Err(CliError::Input("--threads must be positive".into()));
        }
        return Ok(t);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(t),
            _ => Err(CliError::Input(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Runs `body` on a pool of exactly `threads` workers.
fn with_pool<T: Send>(threads: usize, body: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Input(format!("cannot start {threads} threads: {e}")))?;
    Ok(pool.install(body))
}

fn settings(solver: &SolverArgs, run: &RunArgs, threads: usize) -> RunSettings {
    RunSettings {
        method: solver.method,
        solver: solver.config(),
        extraction: ExtractionConfig {
            rank_tol: run.rank_tol,
            seed: run.seed,
            refine: !run.no_refine,
            ..ExtractionConfig::default()
        },
        timing: !run.no_timing,
        threads,
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write { path: PathBuf::from("<stdout>"), source })
        }
    }
}

/// Sidecar path `<dir>/<stem>.meta.json` for a problem file.
pub fn sidecar_path(problem: &Path) -> PathBuf {
    let stem = problem.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    problem.with_file_name(format!("{stem}.meta.json"))
}

fn cmd_build(a: &BuildArgs) -> CliResult<u8> {
    let problem = input::read_problem(&a.problem)?;
    let art = pipeline::build(&problem)?;
    let meta = sidecar_path(&a.out);
    art.write(&a.out, &meta).map_err(|e| match e {
        regsos::Error::Io(source) => CliError::Write { path: a.out.clone(), source },
        e => CliError::Runtime(e),
    })?;
    Ok(0)
}

fn cmd_stability(a: &StabilityArgs) -> CliResult<u8> {
    let graph = input::read_graph(&a.graph)?;
    let threads = resolve_threads(a.run.threads)?;
    let s = settings(&a.solver, &a.run, threads);
    let report = with_pool(threads, || pipeline::run_stability(&graph, &s))??;
    emit(a.run.out.as_deref(), &report.to_json())?;
    Ok(report.exit_code())
}

fn cmd_oracle(a: &OracleArgs) -> CliResult<u8> {
    let f = input::read_polynomial(&a.poly)?;
    let g = match &a.constraints {
        Some(p) => input::read_constraints(p)?,
        None => Vec::new(),
    };
    let domain = match a.kind {
        Kind::Homogeneous => Domain::Sphere,
        _ if !g.is_empty() => Domain::Semialgebraic { g, radius: a.radius },
        Kind::Constrained => return Err(CliError::Input("--kind constrained needs --constraints".into())),
        _ => Domain::Free { scale: a.scale },
    };
    let spec = OracleSpec { domain, samples: a.samples, starts: a.starts, seed: a.seed };
    let threads = resolve_threads(a.threads)?;
    let report = with_pool(threads, || oracle::sample_minimum(&f, &spec))??;
    emit(a.out.as_deref(), &report.to_json())?;
    Ok(0)
}

/// Executes a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Solve(a) => {
            let problem = input::read_problem(&a.problem)?;
            let threads = resolve_threads(a.run.threads)?;
            let s = settings(&a.solver, &a.run, threads);
            let report = with_pool(threads, || pipeline::run_problem(&problem, &s))??;
            emit(a.run.out.as_deref(), &report.to_json())?;
            Ok(report.exit_code())
        }
        Command::Stability(a) => cmd_stability(&a),
        Command::Build(a) => cmd_build(&a),
        Command::Oracle(a) => cmd_oracle(&a),
    }
}
