//! Builders that compile polynomial optimization problems into conic SDPs.
//!
//! Every builder returns a [`RelaxationArtifact`]: the SDP together with the
//! constants needed to turn its optimal value into a polynomial lower bound,
//! a closed-form or diagonal approximation of `(AA*)⁻¹`, and a description of
//! where the moment information lives for minimizer extraction.

mod homogeneous;
mod lasserre;
mod sparse;
mod stability;
mod unconstrained;

pub use homogeneous::{build_homogeneous, odd_scale, odd_to_even};
pub use lasserre::build_lasserre;
pub use sparse::{build_sparse_lasserre, chordal_cliques, csp_graph, CspGraph, SparseConstraint};
pub use stability::stability_polynomial;
pub use unconstrained::build_unconstrained;

use std::path::Path;

use serde::{Deserialize, Serialize};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::poly::{MonomialBasis, MultiIndex, Polynomial};
use crate::sdp::{ConicSdpProblem, ConstraintMatrix, Entry};
use crate::solver::{
    CholeskyInverse, DiagMinusRankOne, DiagonalMap, GramCgInverse, IdentityMap, LinearMap, PrecondKind,
};

/// Largest `m` for which a dense Cholesky factor of `AA*` is formed when no
/// closed form is known.
pub const DENSE_GRAM_LIMIT: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Unconstrained,
    Homogeneous,
    Lasserre,
    SparseLasserre,
}

/// Closed-form or diagonal approximation of `(AA*)⁻¹`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrecondPayload {
    /// `(AA*)⁻¹ = diag(a)`.
    ExactDiagonal { a: Vec<f64> },
    /// `(AA*)⁻¹ = diag(h) − ppᵀ`.
    DiagMinusRankOne { h: Vec<f64>, p: Vec<f64> },
    /// `diag(AA*)`, no closed-form inverse.
    DiagonalOfGram { d: Vec<f64> },
}

/// Where the moment information of a solved relaxation lives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtractionSchema {
    /// Block 0 is the moment matrix indexed by `[x]_d`.
    Dense { n: usize, d: u32 },
    /// Block 0 is the moment matrix indexed by `[x^d]`.
    Homogeneous { n: usize, d: u32 },
    /// `x_i = −y[rows[i]]`; clique blocks are `clique_blocks`.
    Sparse { n: usize, rows: Vec<Option<usize>>, clique_blocks: Vec<usize> },
}

/// A built SDP plus what is needed after solving it.
#[derive(Clone, Debug)]
pub struct RelaxationArtifact {
    pub problem: ConicSdpProblem,
    pub meta: ArtifactMeta,
}

/// The serializable part of an artifact (the "sidecar" next to the problem file).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArtifactMeta {
    pub family: Family,
    pub bound_offset: f64,
    pub odd_scale: Option<f64>,
    pub precond: PrecondPayload,
    pub schema: ExtractionSchema,
    /// Variable sets of the clique blocks, for sparse builds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cliques: Vec<Vec<usize>>,
}

impl RelaxationArtifact {
    pub fn family(&self) -> Family {
        self.meta.family
    }

    /// The polynomial lower bound `(−C•X + offset)·scale` from an SDP objective.
    pub fn recover_bound(&self, sdp_primal_objective: f64) -> f64 {
        recover_bound(&self.meta, sdp_primal_objective)
    }

    /// Newton-system preconditioner of the requested kind.
    pub fn precond_map(&self, kind: PrecondKind) -> Box<dyn LinearMap + '_> {
        let p = &self.problem;
        match kind {
            PrecondKind::None => Box::new(IdentityMap(p.m())),
            PrecondKind::Diag => Box::new(DiagonalMap::inverse_of(&p.gram_diag())),
            PrecondKind::Exact => match &self.meta.precond {
                PrecondPayload::ExactDiagonal { a } => Box::new(DiagonalMap(a.clone())),
                PrecondPayload::DiagMinusRankOne { h, p } => Box::new(DiagMinusRankOne { h: h.clone(), p: p.clone() }),
                PrecondPayload::DiagonalOfGram { d } => {
                    if p.m() <= DENSE_GRAM_LIMIT {
                        if let Ok(c) = CholeskyInverse::of_gram(p) {
                            return Box::new(c);
                        }
                    }
                    Box::new(DiagonalMap::inverse_of(d))
                }
            },
        }
    }

    /// A solver for `AA*y = w`, as needed by the boundary point method.
    pub fn gram_inverse(&self) -> Box<dyn LinearMap + '_> {
        match &self.meta.precond {
            PrecondPayload::DiagonalOfGram { .. } => gram_inverse_generic(&self.problem),
            _ => self.precond_map(PrecondKind::Exact),
        }
    }

    /// Writes `<stem>.json` (the problem) and `<stem>.meta.json` (the sidecar).
    pub fn write(&self, problem_path: &Path, meta_path: &Path) -> Result<()> {
        self.problem.write(problem_path)?;
        std::fs::write(meta_path, serde_json::to_string_pretty(&self.meta)? + "\n")?;
        Ok(())
    }

    pub fn read(problem_path: &Path, meta_path: &Path) -> Result<Self> {
        let problem = ConicSdpProblem::read(problem_path)?;
        let meta: ArtifactMeta = serde_json::from_str(&std::fs::read_to_string(meta_path)?)?;
        Ok(RelaxationArtifact { problem, meta })
    }
}

/// `(AA*)⁻¹` for a problem without closed form: dense Cholesky when small,
/// otherwise CG on the Gram operator.
pub fn gram_inverse_generic(p: &ConicSdpProblem) -> Box<dyn LinearMap + '_> {
    if p.m() <= DENSE_GRAM_LIMIT {
        if let Ok(c) = CholeskyInverse::of_gram(p) {
            return Box::new(c);
        }
    }
    Box::new(GramCgInverse::new(p, 1e-12, 1000))
}

pub fn recover_bound(meta: &ArtifactMeta, sdp_primal_objective: f64) -> f64 {
    let b = -sdp_primal_objective + meta.bound_offset;
    match meta.odd_scale {
        Some(s) => s * b,
        None => b,
    }
}

/// Dense block of size `n` with a single 1 in the top-left corner.
pub(crate) fn corner(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(0, 0)] = 1.0;
    m
}

/// Turns per-label entry buckets into constraint matrices.
pub(crate) fn finish_constraints(buckets: Vec<Vec<Entry>>) -> Result<Vec<ConstraintMatrix>> {
    buckets.into_iter().map(ConstraintMatrix::accumulate).collect()
}

/// `[x_v]_d` written with global exponent vectors of length `n`, in graded order.
pub(crate) fn local_basis(n: usize, vars: &[usize], d: u32) -> Vec<MultiIndex> {
    if vars.is_empty() {
        return vec![MultiIndex::zeros(n)];
    }
    MonomialBasis::up_to(vars.len(), d)
        .entries()
        .iter()
        .map(|b| {
            let mut e = vec![0u32; n];
            for (k, &v) in vars.iter().enumerate() {
                e[v] = b.exponents()[k];
            }
            MultiIndex::new(e)
        })
        .collect()
}

/// `⌈deg g / 2⌉`.
pub(crate) fn half_degree(g: &Polynomial) -> u32 {
    g.degree().div_ceil(2)
}

/// Rejects nonpositive constant constraints and variable-count mismatches.
pub(crate) fn check_constraint(g: &Polynomial, n: usize) -> Result<()> {
    if g.nvars() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.nvars() });
    }
    if g.degree() == 0 && g.constant_term() <= 0.0 {
        return Err(Error::Invalid(format!("constant constraint {} must be positive", g.constant_term())));
    }
    Ok(())
}
