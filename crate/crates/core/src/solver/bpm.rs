use crate::cone::BlockSymMatrix;
use crate::error::{Error, Result};
use crate::sdp::ConicSdpProblem;

use super::linmap::LinearMap;
use super::newton::finish;
use super::{Counters, IterationLog, SolverConfig, Status};

const DIVERGE_FACTOR: f64 = 1e8;
const BALANCE: f64 = 10.0;

/// Boundary point method.
///
/// `gram_inverse` solves `AA*y = w`. The loop runs in sweeps of
/// `cfg.max_inner` iterations, at most `cfg.max_outer` sweeps. After each
/// sweep σ is multiplied by `cfg.rho` when the dual residual dominates the
/// primal one by more than a factor 10, divided by it in the opposite case,
/// and kept within `[1/σ_max, σ_max]`.
pub fn solve_bpm(p: &ConicSdpProblem, cfg: &SolverConfig, gram_inverse: &dyn LinearMap) -> Result<super::Solution> {
    cfg.validate()?;
    if gram_inverse.dim() != p.m() {
        return Err(Error::DimensionMismatch { expected: p.m(), found: gram_inverse.dim() });
    }
    let cone = p.cone().clone();
    let mut x = BlockSymMatrix::zeros(&cone);
    let mut z = BlockSymMatrix::zeros(&cone);
    let mut y = vec![0.0; p.m()];
    let mut sigma = cfg.sigma0;
    let mut counters = Counters::default();
    let mut history = Vec::new();
    let mut status = Status::MaxIterations;

    let primal0 = p.b().iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    let dual0 = p.c().norm().max(1.0);

    'outer: for k in 0..cfg.max_outer {
        let inner0 = counters.inner;
        let mut primal = f64::INFINITY;
        let mut dual = f64::INFINITY;
        for _ in 0..cfg.max_inner {
            let ymat = x;
            // AA*y = A(C − Z) + (b − A(Y))/σ
            let cz = p.c().lin_comb(1.0, &z, -1.0)?;
            let acz = p.apply_a(&cz)?;
            let ay = p.apply_a(&ymat)?;
            let rhs: Vec<f64> = (0..p.m()).map(|i| acz[i] + (p.b()[i] - ay[i]) / sigma).collect();
            y = gram_inverse.apply_vec(&rhs);

            let mut w = p.apply_a_adjoint(&y)?;
            w.axpy(-1.0, p.c())?;
            w.axpy(1.0 / sigma, &ymat)?;
            let split = w.project_split()?;
            x = split.pos.scaled(sigma);
            z = split.neg.scaled(-1.0);
            counters.inner += 1;

            let ax = p.apply_a(&x)?;
            primal = p.b().iter().zip(&ax).map(|(b, a)| (b - a).powi(2)).sum::<f64>().sqrt();
            // C − Z − A*(y) = (Y − X)/σ
            dual = ymat.lin_comb(1.0, &x, -1.0)?.norm() / sigma;
            if primal < cfg.eps_out && dual < cfg.eps_out {
                status = Status::Converged;
                break;
            }
            if !(primal.is_finite() && dual.is_finite())
                || primal > DIVERGE_FACTOR * primal0
                || dual > DIVERGE_FACTOR * dual0
            {
                status = Status::Diverged;
                break;
            }
        }
        counters.outer = k + 1;
        history.push(IterationLog {
            outer: k + 1,
            sigma,
            primal,
            dual,
            objective_primal: p.objective_primal(&x)?,
            objective_dual: p.objective_dual(&y)?,
            inner: counters.inner - inner0,
            cg: 0,
        });
        if status != Status::MaxIterations {
            break 'outer;
        }
        // keep the two residuals within a factor BALANCE of each other
        if dual > BALANCE * primal && sigma * cfg.rho <= cfg.sigma_max {
            sigma *= cfg.rho;
        } else if primal > BALANCE * dual && sigma / cfg.rho >= 1.0 / cfg.sigma_max {
            sigma /= cfg.rho;
        }
    }
    finish(p, status, x, y, z, sigma, history, counters)
}
