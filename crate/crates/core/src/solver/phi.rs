use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::cone::{BlockEigen, BlockSymMatrix};
use crate::error::{Error, Result};
use crate::sdp::ConicSdpProblem;

/// Spectral data of `W = A*(y) − C + Y/σ` for applying the generalized
/// Hessian of `φ_σ`.
#[derive(Clone, Debug)]
pub struct HessianContext {
    blocks: Vec<BlockHessian>,
}

#[derive(Clone, Debug)]
struct BlockHessian {
    q: DMatrix<f64>,
    lambda: DVector<f64>,
    /// `|Γ₊|`; eigenvalues are sorted so `Γ₊ = 0..r`.
    r: usize,
    /// `ν(i, j) = λ_i / (λ_i − λ_j)` for `i ∈ Γ₊`, `j ∈ Γ₋`.
    nu: DMatrix<f64>,
}

impl HessianContext {
    pub fn from_eigen(eig: &[BlockEigen]) -> Self {
        HessianContext { blocks: eig.iter().map(BlockHessian::new).collect() }
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Eigenvalues of block `k`, in descending order.
    pub fn eigenvalues(&self, k: usize) -> &DVector<f64> {
        &self.blocks[k].lambda
    }

    pub fn eigenvectors(&self, k: usize) -> &DMatrix<f64> {
        &self.blocks[k].q
    }

    /// The full weight matrix `Ω^{(k)}`.
    pub fn omega(&self, k: usize) -> DMatrix<f64> {
        let b = &self.blocks[k];
        let n = b.lambda.len();
        let mut o = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                o[(i, j)] = match (i < b.r, j < b.r) {
                    (true, true) => 1.0,
                    (true, false) => b.nu[(i, j - b.r)],
                    (false, true) => b.nu[(j, i - b.r)],
                    (false, false) => 0.0,
                };
            }
        }
        o
    }

    /// True when every eigenvalue of every block lies in `Γ₋`.
    pub fn all_negative(&self) -> bool {
        self.blocks.iter().all(|b| b.r == 0)
    }

    /// True when every eigenvalue of every block lies in `Γ₊`.
    pub fn all_nonnegative(&self) -> bool {
        self.blocks.iter().all(|b| b.r == b.lambda.len())
    }
}

impl BlockHessian {
    fn new(e: &BlockEigen) -> Self {
        let n = e.values.len();
        let r = e.num_nonneg();
        let nu = DMatrix::from_fn(r, n - r, |i, j| {
            let li = e.values[i];
            let lj = e.values[r + j];
            li / (li - lj)
        });
        BlockHessian { q: e.vectors.clone(), lambda: e.values.clone(), r, nu }
    }

    /// `Q(Ω ∘ (QᵀMQ))Qᵀ`, formed on the smaller of `Γ₊`, `Γ₋`.
    fn transform(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.lambda.len();
        let r = self.r;
        if r == n {
            return m.clone();
        }
        if r == 0 {
            return DMatrix::zeros(n, n);
        }
        let qp = self.q.columns(0, r);
        let qn = self.q.columns(r, n - r);
        if r <= n - r {
            let h = qp.transpose() * m;
            let tpp = &h * qp;
            let mut v = &h * qn;
            v.component_mul_assign(&self.nu);
            let inner = tpp * qp.transpose() * 0.5 + v * qn.transpose();
            let r1 = qp * inner;
            &r1 + r1.transpose()
        } else {
            // Ω ∘ T = T − (1 − Ω) ∘ T, and 1 − Ω vanishes on Γ₊ × Γ₊
            let h = qn.transpose() * m;
            let tnn = &h * qn;
            let mut v = &h * qp;
            for j in 0..n - r {
                for i in 0..r {
                    v[(j, i)] *= 1.0 - self.nu[(i, j)];
                }
            }
            let inner = tnn * qn.transpose() * 0.5 + v * qp.transpose();
            let r1 = qn * inner;
            m - (&r1 + r1.transpose())
        }
    }
}

/// Value, gradient and projections of the augmented Lagrangian dual
/// `φ_σ(Y, y) = bᵀy − (σ/2)‖(A*(y) − C + Y/σ)_K‖² + ‖Y‖²/(2σ)`.
#[derive(Clone, Debug)]
pub struct PhiEval {
    pub value: f64,
    /// Sum of the magnitudes of the three terms of `value`; bounds its roundoff.
    pub magnitude: f64,
    /// `∇_y φ_σ = b − A(X)`.
    pub grad: Vec<f64>,
    pub ctx: HessianContext,
    /// `X = σ(W)_K`.
    pub x: BlockSymMatrix,
    /// `Z = −(W)_{−K}`.
    pub z: BlockSymMatrix,
}

impl PhiEval {
    pub fn grad_norm(&self) -> f64 {
        self.grad.iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

pub fn phi_value_and_grad(p: &ConicSdpProblem, ymat: &BlockSymMatrix, y: &[f64], sigma: f64) -> Result<PhiEval> {
    if !(sigma > 0.0) {
        return Err(Error::Invalid(format!("sigma must be positive, got {sigma}")));
    }
    let mut w = p.apply_a_adjoint(y)?;
    w.axpy(-1.0, p.c())?;
    w.axpy(1.0 / sigma, ymat)?;
    let split = w.project_split()?;
    let pos_sq = split.pos.norm_squared();
    let by = p.objective_dual(y)?;
    let reg = ymat.norm_squared() / (2.0 * sigma);
    let value = by - 0.5 * sigma * pos_sq + reg;
    let magnitude = by.abs() + 0.5 * sigma * pos_sq + reg;
    let x = split.pos.scaled(sigma);
    let ax = p.apply_a(&x)?;
    let grad = p.b().iter().zip(&ax).map(|(b, a)| b - a).collect();
    Ok(PhiEval { value, magnitude, grad, ctx: HessianContext::from_eigen(&split.eig), x, z: split.neg.scaled(-1.0) })
}

/// `L·z = σ Σ_k A_k(Q_k(Ω^{(k)} ∘ (Q_kᵀ A_k*(z) Q_k))Q_kᵀ)`.
pub fn hessian_apply(ctx: &HessianContext, p: &ConicSdpProblem, z: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if ctx.num_blocks() != p.cone().num_blocks() {
        return Err(Error::Shape(format!(
            "context has {} blocks, problem has {}",
            ctx.num_blocks(),
            p.cone().num_blocks()
        )));
    }
    if z.len() != p.m() {
        return Err(Error::DimensionMismatch { expected: p.m(), found: z.len() });
    }
    if ctx.all_negative() {
        return Ok(vec![0.0; p.m()]);
    }
    let az = p.apply_a_adjoint(z)?;
    let blocks: Vec<DMatrix<f64>> =
        az.blocks().par_iter().zip(ctx.blocks.par_iter()).map(|(m, h)| h.transform(m)).collect();
    let t = BlockSymMatrix::from_blocks(blocks)?;
    let mut out = p.apply_a(&t)?;
    for v in &mut out {
        *v *= sigma;
    }
    Ok(out)
}
