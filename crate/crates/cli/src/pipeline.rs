//! Build, solve, extract, report.

use std::time::Instant;

use regsos::extract::{extract, ExtractionConfig, ExtractionMethod, Target};
use regsos::poly::Polynomial;
use regsos::relax::{
    build_homogeneous, build_lasserre, build_sparse_lasserre, build_unconstrained, odd_to_even, stability_polynomial,
    Family, RelaxationArtifact, SparseConstraint,
};
use regsos::sdp::KktResiduals;
use regsos::solver::{solve_bpm, solve_newton_cg, Counters, SolverConfig, Status};
use serde::Serialize;

use crate::args::{Kind, Method};
use crate::error::{CliError, CliResult};
use crate::input::{Graph, Problem};

/// Default relaxation order: large enough for the objective and every constraint.
pub fn default_order(f: &Polynomial, g: &[Polynomial]) -> u32 {
    g.iter().map(|p| p.degree().div_ceil(2)).chain(std::iter::once(f.degree().div_ceil(2))).max().unwrap_or(1).max(1)
}

/// Compiles a problem into an SDP; odd forms are lifted to even ones.
pub fn build(problem: &Problem) -> CliResult<RelaxationArtifact> {
    let f = &problem.f;
    let g = &problem.g;
    let order = problem.order.unwrap_or_else(|| default_order(f, g));
    let art = match problem.kind {
        Kind::Unconstrained => build_unconstrained(f),
        Kind::Homogeneous if f.degree() % 2 == 1 => odd_to_even(f).and_then(|(fhat, scale)| {
            let mut art = build_homogeneous(&fhat)?;
            art.meta.odd_scale = Some(scale);
            Ok(art)
        }),
        Kind::Homogeneous => build_homogeneous(f),
        Kind::Constrained => build_lasserre(f, g, order),
        Kind::Sparse => {
            let cons: Vec<SparseConstraint> = g.iter().cloned().map(SparseConstraint::from_support).collect();
            build_sparse_lasserre(f, &cons, problem.cliques.as_deref(), order)
        }
    };
    art.map_err(CliError::Build)
}

/// Solver and extraction settings of one run.
#[derive(Clone, Debug)]
pub struct RunSettings {
    pub method: Method,
    pub solver: SolverConfig,
    pub extraction: ExtractionConfig,
    pub timing: bool,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub method: Method,
    pub solver: SolverConfig,
    pub rank_tol: f64,
    pub refine: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
}

/// Everything a run produces. Field order is fixed so reports diff cleanly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub status: Status,
    pub family: Family,
    pub block_sizes: Vec<usize>,
    pub m: usize,
    pub f_sos: f64,
    pub objective_primal: f64,
    pub objective_dual: f64,
    pub kkt: KktResiduals,
    pub rank: usize,
    pub method: ExtractionMethod,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub err: f64,
    pub feasible: bool,
    pub certified: bool,
    pub refined: bool,
    pub iterations: Counters,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
    pub config: ConfigEcho,
    pub seed: u64,
    pub threads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_estimate: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// 0 converged, 2 iteration budget exhausted, 3 diverged.
    pub fn exit_code(&self) -> u8 {
        match self.status {
            Status::Converged => 0,
            Status::MaxIterations => 2,
            Status::Diverged => 3,
        }
    }
}

/// Solves a built relaxation and extracts minimizers of `f` subject to `g`.
pub fn solve_artifact(
    art: &RelaxationArtifact,
    f: &Polynomial,
    g: &[Polynomial],
    settings: &RunSettings,
) -> CliResult<RunReport> {
    settings.solver.validate().map_err(CliError::Build)?;
    let start = Instant::now();
    let sol = match settings.method {
        Method::NewtonCg => {
            let pre = art.precond_map(settings.solver.precond);
            solve_newton_cg(&art.problem, &settings.solver, pre.as_ref())
        }
        Method::Bpm => {
            let inv = art.gram_inverse();
            solve_bpm(&art.problem, &settings.solver, inv.as_ref())
        }
    }
    .map_err(CliError::Runtime)?;
    let f_sos = art.recover_bound(sol.objective_primal);
    let target = Target { f, g, f_sos };
    let ex = extract(art, &sol.z, &sol.y, &target, &settings.extraction).map_err(CliError::Runtime)?;
    let elapsed = start.elapsed().as_secs_f64();
    let p = &art.problem;
    Ok(RunReport {
        status: sol.status,
        family: art.family(),
        block_sizes: p.cone().block_sizes.clone(),
        m: p.m(),
        f_sos,
        objective_primal: sol.objective_primal,
        objective_dual: sol.objective_dual,
        kkt: sol.kkt,
        rank: ex.rank,
        method: ex.method,
        points: ex.points,
        weights: ex.weights,
        err: ex.err,
        feasible: ex.feasible,
        certified: ex.certified,
        refined: ex.refined,
        iterations: sol.counters,
        wall_time_seconds: settings.timing.then_some(elapsed),
        config: ConfigEcho {
            method: settings.method,
            solver: settings.solver.clone(),
            rank_tol: settings.extraction.rank_tol,
            refine: settings.extraction.refine,
            kind: None,
            order: None,
        },
        seed: settings.extraction.seed,
        threads: settings.threads,
        alpha_estimate: None,
        diagnostic: ex.diagnostic,
    })
}

pub fn run_problem(problem: &Problem, settings: &RunSettings) -> CliResult<RunReport> {
    let art = build(problem)?;
    let mut report = solve_artifact(&art, &problem.f, &problem.g, settings)?;
    report.config.kind = Some(problem.kind);
    if matches!(problem.kind, Kind::Constrained | Kind::Sparse) {
        report.config.order = Some(problem.order.unwrap_or_else(|| default_order(&problem.f, &problem.g)));
    }
    Ok(report)
}

/// Stability number estimate `round(1/f_sos)`.
pub fn run_stability(graph: &Graph, settings: &RunSettings) -> CliResult<RunReport> {
    if graph.n < 2 {
        return Err(CliError::Input("the sphere formulation needs at least 2 vertices".into()));
    }
    let f = stability_polynomial(&graph.edges, graph.n).map_err(CliError::Build)?;
    let art = build_homogeneous(&f).map_err(CliError::Build)?;
    let mut report = solve_artifact(&art, &f, &[], settings)?;
    if report.f_sos > 0.0 && report.f_sos.is_finite() {
        report.alpha_estimate = Some((1.0 / report.f_sos).round() as u64);
    } else {
        let note = format!("bound {} gives no stability estimate", report.f_sos);
        report.diagnostic = Some(match report.diagnostic.take() {
            Some(d) => format!("{d}; {note}"),
            None => note,
        });
    }
    Ok(report)
}
