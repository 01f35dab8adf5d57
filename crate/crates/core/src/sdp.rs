//! Conic SDP data `min C•X s.t. A(X) = b, X ∈ K` and its dual
//! `max bᵀy s.t. A*(y) + Z = C, Z ∈ K`.

use std::collections::HashMap;
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{BlockSymMatrix, ConeSpec};
use crate::error::{Error, Result};
use crate::poly::MultiIndex;

/// One stored entry of a sparse symmetric block; `row ≤ col`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub block: u32,
    pub row: u32,
    pub col: u32,
    pub value: f64,
}

impl Entry {
    pub fn new(block: usize, row: usize, col: usize, value: f64) -> Self {
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        Entry { block: block as u32, row: row as u32, col: col as u32, value }
    }

    /// Weight of this entry in a Frobenius product: off-diagonals count twice.
    #[inline]
    pub fn mult(&self) -> f64 {
        if self.row == self.col {
            1.0
        } else {
            2.0
        }
    }

    fn key(&self) -> (u32, u32, u32) {
        (self.block, self.row, self.col)
    }
}

/// Sparse symmetric block-diagonal matrix `A_α` in coordinate form.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ConstraintMatrix {
    entries: Vec<Entry>,
}

impl ConstraintMatrix {
    /// Sorts entries and rejects duplicate `(block, row, col)` positions.
    pub fn new(mut entries: Vec<Entry>) -> Result<Self> {
        for e in &mut entries {
            if e.row > e.col {
                std::mem::swap(&mut e.row, &mut e.col);
            }
            if !e.value.is_finite() {
                return Err(Error::Invalid("non-finite constraint entry".into()));
            }
        }
        entries.sort_by_key(Entry::key);
        if let Some(w) = entries.windows(2).find(|w| w[0].key() == w[1].key()) {
            return Err(Error::Invalid(format!(
                "duplicate entry at block {} ({}, {})",
                w[0].block, w[0].row, w[0].col
            )));
        }
        Ok(ConstraintMatrix { entries })
    }

    /// Sums repeated positions instead of rejecting them; drops exact zeros.
    pub fn accumulate(entries: Vec<Entry>) -> Result<Self> {
        let mut map: std::collections::BTreeMap<(u32, u32, u32), f64> = Default::default();
        for e in entries {
            let e = Entry::new(e.block as usize, e.row as usize, e.col as usize, e.value);
            *map.entry(e.key()).or_insert(0.0) += e.value;
        }
        ConstraintMatrix::new(
            map.into_iter()
                .filter(|(_, v)| *v != 0.0)
                .map(|((b, r, c), v)| Entry { block: b, row: r, col: c, value: v })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.value == 0.0)
    }

    /// `A • X`.
    pub fn dot(&self, x: &BlockSymMatrix) -> f64 {
        self.entries
            .iter()
            .map(|e| e.mult() * e.value * x.block(e.block as usize)[(e.row as usize, e.col as usize)])
            .sum()
    }

    /// `out += s·A`.
    pub fn add_scaled_to(&self, s: f64, out: &mut BlockSymMatrix) {
        for e in &self.entries {
            let b = out.block_mut(e.block as usize);
            let (r, c) = (e.row as usize, e.col as usize);
            b[(r, c)] += s * e.value;
            if r != c {
                b[(c, r)] += s * e.value;
            }
        }
    }

    /// `A • A`.
    pub fn norm_squared(&self) -> f64 {
        self.entries.iter().map(|e| e.mult() * e.value * e.value).sum()
    }

    pub fn to_dense(&self, cone: &ConeSpec) -> BlockSymMatrix {
        let mut out = BlockSymMatrix::zeros(cone);
        self.add_scaled_to(1.0, &mut out);
        out
    }

    fn check(&self, cone: &ConeSpec) -> Result<()> {
        for e in &self.entries {
            let k = e.block as usize;
            if k >= cone.num_blocks() || e.col as usize >= cone.block_sizes[k] {
                return Err(Error::Shape(format!(
                    "entry at block {} ({}, {}) outside cone {:?}",
                    e.block, e.row, e.col, cone.block_sizes
                )));
            }
        }
        Ok(())
    }
}

/// Residuals of the optimality system `A(X) = b, A*(y) + Z = C, X•Z = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub compl: f64,
}

/// A conic SDP over a product of PSD blocks.
#[derive(Clone, Debug)]
pub struct ConicSdpProblem {
    cone: ConeSpec,
    c: BlockSymMatrix,
    constraints: Vec<ConstraintMatrix>,
    b: Vec<f64>,
    labels: Vec<MultiIndex>,
}

impl ConicSdpProblem {
    /// `labels` is either empty or has one multi-index per constraint.
    pub fn new(
        cone: ConeSpec,
        c: BlockSymMatrix,
        constraints: Vec<ConstraintMatrix>,
        b: Vec<f64>,
        labels: Vec<MultiIndex>,
    ) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::Invalid("an SDP needs at least one constraint".into()));
        }
        if !c.conforms(&cone) {
            return Err(Error::Shape(format!(
                "cost has blocks {:?}, cone has {:?}",
                c.cone().block_sizes,
                cone.block_sizes
            )));
        }
        if b.len() != constraints.len() {
            return Err(Error::DimensionMismatch { expected: constraints.len(), found: b.len() });
        }
        if !labels.is_empty() && labels.len() != constraints.len() {
            return Err(Error::DimensionMismatch { expected: constraints.len(), found: labels.len() });
        }
        for a in &constraints {
            a.check(&cone)?;
        }
        if !b.iter().all(|v| v.is_finite()) || !c.is_finite() {
            return Err(Error::Invalid("non-finite problem data".into()));
        }
        Ok(ConicSdpProblem { cone, c, constraints, b, labels })
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    pub fn c(&self) -> &BlockSymMatrix {
        &self.c
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn constraints(&self) -> &[ConstraintMatrix] {
        &self.constraints
    }

    pub fn labels(&self) -> &[MultiIndex] {
        &self.labels
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    fn check_x(&self, x: &BlockSymMatrix) -> Result<()> {
        if x.conforms(&self.cone) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "matrix has blocks {:?}, cone has {:?}",
                x.cone().block_sizes,
                self.cone.block_sizes
            )))
        }
    }

    fn check_y(&self, y: &[f64]) -> Result<()> {
        if y.len() == self.m() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.m(), found: y.len() })
        }
    }

    /// `A(X)`, component α equal to `A_α • X`.
    pub fn apply_a(&self, x: &BlockSymMatrix) -> Result<Vec<f64>> {
        self.check_x(x)?;
        Ok(self.constraints.par_iter().map(|a| a.dot(x)).collect())
    }

    /// `A*(y) = Σ_α y_α A_α`.
    pub fn apply_a_adjoint(&self, y: &[f64]) -> Result<BlockSymMatrix> {
        self.check_y(y)?;
        let mut out = BlockSymMatrix::zeros(&self.cone);
        for (a, &v) in self.constraints.iter().zip(y) {
            if v != 0.0 {
                a.add_scaled_to(v, &mut out);
            }
        }
        Ok(out)
    }

    /// `AA*(z)` without forming the Gram matrix.
    pub fn apply_gram(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.apply_a(&self.apply_a_adjoint(z)?)
    }

    /// `diag(AA*)`, entry α equal to `A_α • A_α`.
    pub fn gram_diag(&self) -> Vec<f64> {
        self.constraints.iter().map(ConstraintMatrix::norm_squared).collect()
    }

    /// The dense Gram matrix `AA*` (`m × m`).
    pub fn gram_dense(&self) -> DMatrix<f64> {
        let m = self.m();
        let mut by_pos: HashMap<(u32, u32, u32), Vec<(usize, f64)>> = HashMap::new();
        for (i, a) in self.constraints.iter().enumerate() {
            for e in &a.entries {
                by_pos.entry(e.key()).or_default().push((i, e.value));
            }
        }
        let mut keys: Vec<_> = by_pos.keys().copied().collect();
        keys.sort_unstable();
        let mut g = DMatrix::zeros(m, m);
        for k in keys {
            let list = &by_pos[&k];
            let w = if k.1 == k.2 { 1.0 } else { 2.0 };
            for &(i, vi) in list {
                for &(j, vj) in list {
                    g[(i, j)] += w * vi * vj;
                }
            }
        }
        g
    }

    pub fn objective_primal(&self, x: &BlockSymMatrix) -> Result<f64> {
        self.c.inner(x)
    }

    pub fn objective_dual(&self, y: &[f64]) -> Result<f64> {
        self.check_y(y)?;
        Ok(self.b.iter().zip(y).map(|(a, b)| a * b).sum())
    }

    pub fn kkt(&self, x: &BlockSymMatrix, y: &[f64], z: &BlockSymMatrix) -> Result<KktResiduals> {
        self.check_x(x)?;
        self.check_x(z)?;
        let ax = self.apply_a(x)?;
        let primal = self.b.iter().zip(&ax).map(|(b, a)| (b - a).powi(2)).sum::<f64>().sqrt();
        let mut r = self.apply_a_adjoint(y)?;
        r.axpy(1.0, z)?;
        r.axpy(-1.0, &self.c)?;
        let gap = (self.c.inner(x)? - self.objective_dual(y)?).abs();
        Ok(KktResiduals { primal, dual: r.norm(), gap, compl: x.inner(z)?.abs() })
    }

    /// Serializes to the JSON problem format (see `docs/FORMATS.md`).
    pub fn to_json(&self) -> Result<String> {
        let wire = WireProblem {
            cone: self.cone.clone(),
            c: dense_to_triples(&self.c),
            constraints: self
                .constraints
                .iter()
                .enumerate()
                .map(|(i, a)| WireConstraint {
                    label: self.labels.get(i).cloned(),
                    blocks: sparse_to_triples(a, self.cone.num_blocks()),
                })
                .collect(),
            b: self.b.clone(),
        };
        Ok(serde_json::to_string_pretty(&wire)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: WireProblem = serde_json::from_str(text)?;
        let cone = ConeSpec::new(wire.cone.block_sizes.clone())?;
        let l = cone.num_blocks();
        if wire.c.len() != l {
            return Err(Error::Shape(format!("C has {} blocks, cone has {l}", wire.c.len())));
        }
        let mut c = BlockSymMatrix::zeros(&cone);
        let c_entries = triples_to_entries(&wire.c, &cone)?;
        ConstraintMatrix::new(c_entries)?.add_scaled_to(1.0, &mut c);
        let mut constraints = Vec::with_capacity(wire.constraints.len());
        let mut labels = Vec::new();
        let all_labeled = wire.constraints.iter().all(|w| w.label.is_some());
        for w in wire.constraints {
            if w.blocks.len() != l {
                return Err(Error::Shape(format!("constraint has {} blocks, cone has {l}", w.blocks.len())));
            }
            constraints.push(ConstraintMatrix::new(triples_to_entries(&w.blocks, &cone)?)?);
            if all_labeled {
                labels.push(w.label.unwrap());
            }
        }
        ConicSdpProblem::new(cone, c, constraints, wire.b, labels)
    }

    pub fn read(path: &Path) -> Result<Self> {
        ConicSdpProblem::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

type Triple = (u32, u32, f64);

#[derive(Serialize, Deserialize)]
struct WireProblem {
    cone: ConeSpec,
    #[serde(rename = "C")]
    c: Vec<Vec<Triple>>,
    constraints: Vec<WireConstraint>,
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct WireConstraint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<MultiIndex>,
    blocks: Vec<Vec<Triple>>,
}

fn dense_to_triples(x: &BlockSymMatrix) -> Vec<Vec<Triple>> {
    x.blocks()
        .iter()
        .map(|b| {
            let mut t = Vec::new();
            for c in 0..b.ncols() {
                for r in 0..=c {
                    if b[(r, c)] != 0.0 {
                        t.push((r as u32, c as u32, b[(r, c)]));
                    }
                }
            }
            t.sort_by_key(|&(r, c, _)| (r, c));
            t
        })
        .collect()
}

fn sparse_to_triples(a: &ConstraintMatrix, l: usize) -> Vec<Vec<Triple>> {
    let mut out = vec![Vec::new(); l];
    for e in a.entries() {
        out[e.block as usize].push((e.row, e.col, e.value));
    }
    out
}

fn triples_to_entries(blocks: &[Vec<Triple>], cone: &ConeSpec) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (k, t) in blocks.iter().enumerate() {
        for &(r, c, v) in t {
            let n = cone.block_sizes[k] as u32;
            if r >= n || c >= n {
                return Err(Error::Shape(format!("entry ({r}, {c}) outside block {k} of size {n}")));
            }
            out.push(Entry::new(k, r as usize, c as usize, v));
        }
    }
    Ok(out)
}
