//! Block-diagonal symmetric matrices and the cone `K = S+^{N1} × … × S+^{Nℓ}`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Block sizes `(N_1, …, N_ℓ)` of a product of PSD cones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub block_sizes: Vec<usize>,
}

impl ConeSpec {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() || block_sizes.contains(&0) {
            return Err(Error::Shape(format!("invalid block sizes {block_sizes:?}")));
        }
        Ok(ConeSpec { block_sizes })
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    /// Dimension of the ambient space `Σ N_k(N_k+1)/2`.
    pub fn svec_dim(&self) -> usize {
        self.block_sizes.iter().map(|n| n * (n + 1) / 2).sum()
    }
}

/// A tuple of dense symmetric blocks `X = (X_1, …, X_ℓ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSymMatrix {
    blocks: Vec<DMatrix<f64>>,
}

impl BlockSymMatrix {
    pub fn zeros(cone: &ConeSpec) -> Self {
        BlockSymMatrix { blocks: cone.block_sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect() }
    }

    pub fn identity(cone: &ConeSpec) -> Self {
        BlockSymMatrix { blocks: cone.block_sizes.iter().map(|&n| DMatrix::identity(n, n)).collect() }
    }

    /// Wraps square blocks, replacing each by its symmetric part.
    pub fn from_blocks(blocks: Vec<DMatrix<f64>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Shape("no blocks".into()));
        }
        let mut out = Vec::with_capacity(blocks.len());
        for b in blocks {
            if !b.is_square() || b.nrows() == 0 {
                return Err(Error::Shape(format!("block of shape {}x{}", b.nrows(), b.ncols())));
            }
            let t = b.transpose();
            out.push((b + t) * 0.5);
        }
        Ok(BlockSymMatrix { blocks: out })
    }

    pub fn cone(&self) -> ConeSpec {
        ConeSpec { block_sizes: self.blocks.iter().map(|b| b.nrows()).collect() }
    }

    pub fn blocks(&self) -> &[DMatrix<f64>] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &DMatrix<f64> {
        &self.blocks[k]
    }

    /// Mutable access; the caller keeps the block symmetric.
    pub fn block_mut(&mut self, k: usize) -> &mut DMatrix<f64> {
        &mut self.blocks[k]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn conforms(&self, cone: &ConeSpec) -> bool {
        self.blocks.len() == cone.block_sizes.len()
            && self.blocks.iter().zip(&cone.block_sizes).all(|(b, &n)| b.nrows() == n)
    }

    fn check_same(&self, other: &BlockSymMatrix) -> Result<()> {
        let ok = self.blocks.len() == other.blocks.len()
            && self.blocks.iter().zip(&other.blocks).all(|(a, b)| a.nrows() == b.nrows());
        if ok {
            Ok(())
        } else {
            Err(Error::Shape(format!("block sizes {:?} vs {:?}", self.cone().block_sizes, other.cone().block_sizes)))
        }
    }

    /// `X • Y = Σ_k tr(X_k Y_k)`.
    pub fn inner(&self, other: &BlockSymMatrix) -> Result<f64> {
        self.check_same(other)?;
        Ok(self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.dot(b)).sum())
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }

    /// `self += a·x`.
    pub fn axpy(&mut self, a: f64, x: &BlockSymMatrix) -> Result<()> {
        self.check_same(x)?;
        for (s, b) in self.blocks.iter_mut().zip(&x.blocks) {
            *s += b * a;
        }
        Ok(())
    }

    pub fn scale_mut(&mut self, a: f64) {
        for b in &mut self.blocks {
            *b *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> BlockSymMatrix {
        let mut out = self.clone();
        out.scale_mut(a);
        out
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &BlockSymMatrix, b: f64) -> Result<BlockSymMatrix> {
        self.check_same(other)?;
        Ok(BlockSymMatrix { blocks: self.blocks.iter().zip(&other.blocks).map(|(x, y)| x * a + y * b).collect() })
    }

    /// Spectral split `X = X₊ + X₋` with `X₊ ∈ K`, `X₋ ∈ −K`.
    pub fn project_split(&self) -> Result<SpectralSplit> {
        let parts = self.blocks.par_iter().map(split_block).collect::<Result<Vec<_>>>()?;
        let mut pos = Vec::with_capacity(parts.len());
        let mut neg = Vec::with_capacity(parts.len());
        let mut eig = Vec::with_capacity(parts.len());
        for (a, b, e) in parts {
            pos.push(a);
            neg.push(b);
            eig.push(e);
        }
        Ok(SpectralSplit { pos: BlockSymMatrix { blocks: pos }, neg: BlockSymMatrix { blocks: neg }, eig })
    }

    /// Projection onto `K`.
    pub fn project_psd(&self) -> Result<BlockSymMatrix> {
        Ok(self.project_split()?.pos)
    }
}

/// Eigen-decomposition of one block, eigenvalues sorted in descending order.
#[derive(Clone, Debug)]
pub struct BlockEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl BlockEigen {
    /// Count of eigenvalues in `Γ₊ = {i : λ_i ≥ 0}`.
    pub fn num_nonneg(&self) -> usize {
        self.values.iter().take_while(|&&v| v >= 0.0).count()
    }
}

/// Result of [`BlockSymMatrix::project_split`].
#[derive(Clone, Debug)]
pub struct SpectralSplit {
    pub pos: BlockSymMatrix,
    pub neg: BlockSymMatrix,
    pub eig: Vec<BlockEigen>,
}

/// Symmetric eigendecomposition with eigenvalues sorted in descending order.
pub fn sym_eigen(m: &DMatrix<f64>) -> Result<BlockEigen> {
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::Eigen("non-finite matrix entry".into()));
    }
    let n = m.nrows();
    let se = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].total_cmp(&se.eigenvalues[i]).then(i.cmp(&j)));
    let values = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        vectors.set_column(c, &se.eigenvectors.column(i));
    }
    if !values.iter().all(|v| v.is_finite()) {
        return Err(Error::Eigen("eigenvalue iteration did not converge".into()));
    }
    Ok(BlockEigen { values, vectors })
}

fn split_block(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>, BlockEigen)> {
    let e = sym_eigen(m)?;
    let n = m.nrows();
    let p = e.num_nonneg();
    let pos = weighted_outer(&e, 0..p, n);
    let neg = weighted_outer(&e, p..n, n);
    Ok((pos, neg, e))
}

// Σ_{i∈range} λ_i u_i u_iᵀ, formed as (U_r Λ_r) U_rᵀ on the smaller side.
fn weighted_outer(e: &BlockEigen, range: std::ops::Range<usize>, n: usize) -> DMatrix<f64> {
    if range.is_empty() {
        return DMatrix::zeros(n, n);
    }
    let u = e.vectors.columns(range.start, range.len());
    let mut ul = u.clone_owned();
    for (c, i) in range.enumerate() {
        ul.column_mut(c).scale_mut(e.values[i]);
    }
    let out = &ul * u.transpose();
    (&out + out.transpose()) * 0.5
}
