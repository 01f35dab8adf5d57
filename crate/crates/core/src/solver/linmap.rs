use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::sdp::ConicSdpProblem;

use super::pcg::pcg;

/// A symmetric linear operator on `R^m` applied matrix-free.
pub trait LinearMap: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply(x, &mut out);
        out
    }
}

#[derive(Clone, Debug)]
pub struct IdentityMap(pub usize);

impl LinearMap for IdentityMap {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
}

#[derive(Clone, Debug)]
pub struct DiagonalMap(pub Vec<f64>);

impl DiagonalMap {
    /// `diag(d)⁻¹`; zero entries are mapped to one.
    pub fn inverse_of(d: &[f64]) -> Self {
        DiagonalMap(d.iter().map(|&v| if v > 0.0 { 1.0 / v } else { 1.0 }).collect())
    }
}

impl LinearMap for DiagonalMap {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for ((o, a), b) in out.iter_mut().zip(x).zip(&self.0) {
            *o = a * b;
        }
    }
}

/// `diag(h) − ppᵀ`.
#[derive(Clone, Debug)]
pub struct DiagMinusRankOne {
    pub h: Vec<f64>,
    pub p: Vec<f64>,
}

impl LinearMap for DiagMinusRankOne {
    fn dim(&self) -> usize {
        self.h.len()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let px: f64 = self.p.iter().zip(x).map(|(a, b)| a * b).sum();
        for i in 0..x.len() {
            out[i] = self.h[i] * x[i] - self.p[i] * px;
        }
    }
}

/// Inverse of a dense SPD matrix through its Cholesky factor.
pub struct CholeskyInverse {
    chol: Cholesky<f64, Dyn>,
}

impl CholeskyInverse {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        let chol = Cholesky::new(a).ok_or_else(|| Error::Invalid("matrix is not positive definite".into()))?;
        Ok(CholeskyInverse { chol })
    }

    /// `(AA*)⁻¹` of a problem whose constraints are linearly independent.
    pub fn of_gram(p: &ConicSdpProblem) -> Result<Self> {
        CholeskyInverse::new(p.gram_dense())
    }
}

impl LinearMap for CholeskyInverse {
    fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let s = self.chol.solve(&DVector::from_column_slice(x));
        out.copy_from_slice(s.as_slice());
    }
}

/// The Gram operator `AA*`.
pub struct GramMap<'a>(pub &'a ConicSdpProblem);

impl LinearMap for GramMap<'_> {
    fn dim(&self) -> usize {
        self.0.m()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let v = self.0.apply_gram(x).expect("length checked by caller");
        out.copy_from_slice(&v);
    }
}

/// Approximate `(AA*)⁻¹` computed by diagonally preconditioned CG.
pub struct GramCgInverse<'a> {
    gram: GramMap<'a>,
    precond: DiagonalMap,
    tol: f64,
    cap: usize,
}

impl<'a> GramCgInverse<'a> {
    pub fn new(p: &'a ConicSdpProblem, tol: f64, cap: usize) -> Self {
        GramCgInverse { gram: GramMap(p), precond: DiagonalMap::inverse_of(&p.gram_diag()), tol, cap }
    }
}

impl LinearMap for GramCgInverse<'_> {
    fn dim(&self) -> usize {
        self.gram.dim()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let r = pcg(&self.gram, x, &self.precond, self.cap, self.tol);
        out.copy_from_slice(&r.x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_minus_rank_one_matches_dense() {
        let m = DiagMinusRankOne { h: vec![1.0, 2.0, 3.0], p: vec![0.1, -0.2, 0.3] };
        let dense = DMatrix::from_diagonal(&DVector::from_vec(m.h.clone()))
            - DVector::from_vec(m.p.clone()) * DVector::from_vec(m.p.clone()).transpose();
        let x = [0.5, -1.0, 2.0];
        let want = &dense * DVector::from_column_slice(&x);
        let got = m.apply_vec(&x);
        for i in 0..3 {
            assert!((got[i] - want[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn cholesky_inverse_solves() {
        let a = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let inv = CholeskyInverse::new(a.clone()).unwrap();
        let x = inv.apply_vec(&[1.0, 2.0]);
        let back = &a * DVector::from_vec(x);
        assert!((back[0] - 1.0).abs() < 1e-14 && (back[1] - 2.0).abs() < 1e-14);
        assert!(CholeskyInverse::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
    }
}
