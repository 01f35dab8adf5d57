use crate::cone::BlockSymMatrix;
use crate::error::{Error, Result};
use crate::sdp::ConicSdpProblem;

use super::linmap::LinearMap;
use super::pcg::pcg;
use super::phi::{hessian_apply, phi_value_and_grad, HessianContext, PhiEval};
use super::{dot, norm, Counters, IterationLog, Solution, SolverConfig, Status};

/// Sufficient-increase factor of the backtracking search.
const ARMIJO_MU: f64 = 1e-4;
const MAX_HALVINGS: usize = 40;
const Y_DIVERGE: f64 = 1e12;
const DUAL_OBJ_DIVERGE: f64 = 1e10;

/// `L + εI` as a linear map.
struct NewtonOp<'a> {
    ctx: &'a HessianContext,
    p: &'a ConicSdpProblem,
    sigma: f64,
    shift: f64,
}

impl LinearMap for NewtonOp<'_> {
    fn dim(&self) -> usize {
        self.p.m()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let lx = hessian_apply(self.ctx, self.p, x, self.sigma).expect("shapes fixed at construction");
        for i in 0..x.len() {
            out[i] = lx[i] + self.shift * x[i];
        }
    }
}

enum Step {
    Accepted(PhiEval, Vec<f64>),
    Failed,
}

fn line_search(
    p: &ConicSdpProblem,
    ymat: &BlockSymMatrix,
    y: &[f64],
    d: &[f64],
    cur: &PhiEval,
    sigma: f64,
    delta: f64,
) -> Result<Step> {
    let gd = dot(&cur.grad, d);
    let gnorm = cur.grad_norm();
    let mut t = 1.0;
    for _ in 0..=MAX_HALVINGS {
        let yt: Vec<f64> = y.iter().zip(d).map(|(a, b)| a + t * b).collect();
        let trial = phi_value_and_grad(p, ymat, &yt, sigma)?;
        if trial.value >= cur.value + ARMIJO_MU * t * gd {
            return Ok(Step::Accepted(trial, yt));
        }
        // near the maximizer the change in φ drowns in roundoff
        let noise = 1e-13 * (1.0 + cur.magnitude.max(trial.magnitude));
        if trial.value >= cur.value - noise && trial.grad_norm() < gnorm {
            return Ok(Step::Accepted(trial, yt));
        }
        t *= delta;
    }
    Ok(Step::Failed)
}

/// Newton-CG augmented Lagrangian method.
///
/// `precond` approximates `(AA*)⁻¹` and preconditions every Newton system.
pub fn solve_newton_cg(p: &ConicSdpProblem, cfg: &SolverConfig, precond: &dyn LinearMap) -> Result<Solution> {
    cfg.validate()?;
    if precond.dim() != p.m() {
        return Err(Error::DimensionMismatch { expected: p.m(), found: precond.dim() });
    }
    let cone = p.cone().clone();
    let mut x = BlockSymMatrix::zeros(&cone);
    let mut z = BlockSymMatrix::zeros(&cone);
    let mut y = vec![0.0; p.m()];
    let mut sigma = cfg.sigma0;
    let mut counters = Counters::default();
    let mut history = Vec::new();
    let mut status = Status::MaxIterations;
    let mut prev_primal = f64::INFINITY;

    'outer: for k in 0..cfg.max_outer {
        let ymat = x.clone();
        let mut cur = phi_value_and_grad(p, &ymat, &y, sigma)?;
        let (inner0, cg0) = (counters.inner, counters.cg);
        for _ in 0..cfg.max_inner {
            let gnorm = cur.grad_norm();
            if gnorm <= cfg.eps_in {
                break;
            }
            let mut shift = cfg.eps_shift * (1.0 + sigma);
            let tol = 0.1f64.min(gnorm.sqrt());
            let mut d = None;
            for _ in 0..3 {
                let op = NewtonOp { ctx: &cur.ctx, p, sigma, shift };
                let r = pcg(&op, &cur.grad, precond, cfg.cg_cap, tol);
                counters.cg += r.iters;
                if !r.breakdown || r.iters > 0 && r.x.iter().all(|v| v.is_finite()) {
                    d = Some(r.x);
                    break;
                }
                shift *= 100.0;
            }
            let mut d = d.unwrap_or_else(|| precond.apply_vec(&cur.grad));
            if !(dot(&cur.grad, &d) > 0.0) {
                d = cur.grad.clone();
            }
            counters.inner += 1;
            match line_search(p, &ymat, &y, &d, &cur, sigma, cfg.delta)? {
                Step::Accepted(next, yt) => {
                    cur = next;
                    y = yt;
                }
                Step::Failed => {
                    x = cur.x;
                    z = cur.z;
                    status = Status::Diverged;
                    counters.outer = k + 1;
                    break 'outer;
                }
            }
        }
        x = cur.x;
        z = cur.z;
        counters.outer = k + 1;
        let primal = cur.grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        let dual = dual_residual(p, &y, &z)?;
        let objective_dual = p.objective_dual(&y)?;
        history.push(IterationLog {
            outer: k + 1,
            sigma,
            primal,
            dual,
            objective_primal: p.objective_primal(&x)?,
            objective_dual,
            inner: counters.inner - inner0,
            cg: counters.cg - cg0,
        });
        if primal <= cfg.eps_in && dual <= cfg.eps_out {
            status = Status::Converged;
            break;
        }
        let ynorm = norm(&y);
        if !ynorm.is_finite() || ynorm > Y_DIVERGE {
            status = Status::Diverged;
            break;
        }
        if objective_dual > DUAL_OBJ_DIVERGE && primal > 0.9 * prev_primal {
            status = Status::Diverged;
            break;
        }
        prev_primal = primal;
        if sigma <= cfg.sigma_max {
            sigma *= cfg.rho;
        }
    }
    finish(p, status, x, y, z, sigma, history, counters)
}

pub(super) fn dual_residual(p: &ConicSdpProblem, y: &[f64], z: &BlockSymMatrix) -> Result<f64> {
    let mut r = p.apply_a_adjoint(y)?;
    r.axpy(1.0, z)?;
    r.axpy(-1.0, p.c())?;
    Ok(r.norm())
}

#[allow(clippy::too_many_arguments)]
pub(super) fn finish(
    p: &ConicSdpProblem,
    status: Status,
    x: BlockSymMatrix,
    y: Vec<f64>,
    z: BlockSymMatrix,
    sigma: f64,
    history: Vec<IterationLog>,
    counters: Counters,
) -> Result<Solution> {
    let kkt = p.kkt(&x, &y, &z)?;
    Ok(Solution {
        status,
        objective_primal: p.objective_primal(&x)?,
        objective_dual: p.objective_dual(&y)?,
        x,
        y,
        z,
        kkt,
        sigma,
        history,
        counters,
    })
}
