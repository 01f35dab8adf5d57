//! Regularization solvers: the boundary point method and the Newton-CG
//! augmented Lagrangian method.

mod bpm;
mod linmap;
mod newton;
mod pcg;
mod phi;

pub use bpm::solve_bpm;
pub use linmap::{CholeskyInverse, DiagMinusRankOne, DiagonalMap, GramCgInverse, GramMap, IdentityMap, LinearMap};
pub use newton::solve_newton_cg;
pub use pcg::{pcg, PcgResult};
pub use phi::{hessian_apply, phi_value_and_grad, HessianContext, PhiEval};

use serde::{Deserialize, Serialize};

use crate::cone::BlockSymMatrix;
use crate::error::{Error, Result};
use crate::sdp::KktResiduals;

/// Which approximation of `(AA*)⁻¹` preconditions the Newton system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecondKind {
    Exact,
    Diag,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub eps_in: f64,
    pub eps_out: f64,
    /// The Newton system shift is `eps_shift·(1 + σ)`.
    pub eps_shift: f64,
    pub delta: f64,
    pub rho: f64,
    pub sigma0: f64,
    pub sigma_max: f64,
    pub cg_cap: usize,
    pub max_inner: usize,
    pub max_outer: usize,
    pub precond: PrecondKind,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps_in: 1e-6,
            eps_out: 1e-6,
            eps_shift: 1e-9,
            delta: 0.5,
            rho: 5.0,
            sigma0: 1.0,
            sigma_max: 1e6,
            cg_cap: 500,
            max_inner: 25,
            max_outer: 20,
            precond: PrecondKind::Exact,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Invalid(format!("solver config: {what}")));
        if !(self.eps_in > 0.0 && self.eps_out > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.eps_shift > 0.0) {
            return bad("eps_shift must be positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if !(self.rho > 1.0) {
            return bad("rho must exceed 1");
        }
        if !(self.sigma0 > 0.0 && self.sigma_max > 0.0) {
            return bad("sigma0 and sigma_max must be positive");
        }
        if self.cg_cap == 0 || self.max_inner == 0 || self.max_outer == 0 {
            return bad("iteration caps must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub outer: usize,
    pub inner: usize,
    pub cg: usize,
}

/// Residuals at the end of one outer iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub outer: usize,
    pub sigma: f64,
    pub primal: f64,
    pub dual: f64,
    pub objective_primal: f64,
    pub objective_dual: f64,
    pub inner: usize,
    pub cg: usize,
}

/// Iterates of a solve in progress.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub x: BlockSymMatrix,
    pub ymat: BlockSymMatrix,
    pub z: BlockSymMatrix,
    pub y: Vec<f64>,
    pub sigma: f64,
    pub counters: Counters,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub status: Status,
    pub x: BlockSymMatrix,
    pub y: Vec<f64>,
    pub z: BlockSymMatrix,
    pub kkt: KktResiduals,
    pub objective_primal: f64,
    pub objective_dual: f64,
    pub sigma: f64,
    pub history: Vec<IterationLog>,
    pub counters: Counters,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
