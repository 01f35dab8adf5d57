use std::collections::{BTreeSet, HashMap};

use crate::cone::ConeSpec;
use crate::error::{Error, Result};
use crate::poly::{MultiIndex, Polynomial};
use crate::sdp::{ConicSdpProblem, ConstraintMatrix, Entry};

use super::{
    check_constraint, finish_constraints, half_degree, local_basis, ArtifactMeta, ExtractionSchema, Family,
    PrecondPayload, RelaxationArtifact,
};

/// A constraint `g(x) ≥ 0` together with the variables it may involve.
#[derive(Clone, Debug)]
pub struct SparseConstraint {
    pub g: Polynomial,
    pub vars: Vec<usize>,
}

impl SparseConstraint {
    /// Uses the variables that actually occur in `g`.
    pub fn from_support(g: Polynomial) -> Self {
        let vars = g.support_vars();
        SparseConstraint { g, vars }
    }
}

/// Correlative sparsity graph: `i ~ j` when `x_i, x_j` share a monomial of
/// `f` or the variable set of a constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspGraph {
    pub adj: Vec<BTreeSet<usize>>,
    /// Variables that occur in `f` or some constraint.
    pub active: Vec<bool>,
}

pub fn csp_graph(f: &Polynomial, constraints: &[SparseConstraint]) -> CspGraph {
    let n = f.nvars();
    let mut adj = vec![BTreeSet::new(); n];
    let mut active = vec![false; n];
    let mut link = |vars: &[usize]| {
        for &i in vars {
            active[i] = true;
            for &j in vars {
                if i != j {
                    adj[i].insert(j);
                }
            }
        }
    };
    for (alpha, _) in f.terms() {
        let vars: Vec<usize> = (0..n).filter(|&i| alpha.exponents()[i] > 0).collect();
        link(&vars);
    }
    for c in constraints {
        link(&c.vars);
    }
    CspGraph { adj, active }
}

/// Maximal cliques of a chordal extension built by greedy minimum-degree
/// elimination. Ties go to the lowest index. Output cliques are sorted, and
/// listed in order of their smallest vertex.
pub fn chordal_cliques(graph: &CspGraph) -> Vec<Vec<usize>> {
    let mut adj = graph.adj.clone();
    let mut alive: BTreeSet<usize> = (0..adj.len()).filter(|&v| graph.active[v]).collect();
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    while let Some(&v) = alive.iter().min_by_key(|&&v| (adj[v].len(), v)) {
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nbrs {
            for &b in &nbrs {
                if a != b {
                    adj[a].insert(b);
                }
            }
            adj[a].remove(&v);
        }
        let mut clique = nbrs;
        clique.push(v);
        clique.sort_unstable();
        candidates.push(clique);
        alive.remove(&v);
        adj[v].clear();
    }
    let mut maximal: Vec<Vec<usize>> = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let contained = candidates
            .iter()
            .enumerate()
            .any(|(j, o)| j != i && o.len() >= c.len() && (o.len() > c.len() || j < i) && is_subset(c, o));
        if !contained {
            maximal.push(c.clone());
        }
    }
    maximal.sort();
    maximal
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Sparse order-`d` Lasserre relaxation: one moment block per clique and one
/// localizing block per constraint over its own variables.
///
/// When `cliques` is `None` they are computed with [`chordal_cliques`].
pub fn build_sparse_lasserre(
    f: &Polynomial,
    constraints: &[SparseConstraint],
    cliques: Option<&[Vec<usize>]>,
    d: u32,
) -> Result<RelaxationArtifact> {
    let n = f.nvars();
    if d == 0 {
        return Err(Error::OrderTooSmall { order: d, reason: "the order must be at least 1".into() });
    }
    if f.degree() > 2 * d {
        return Err(Error::OrderTooSmall { order: d, reason: format!("objective has degree {}", f.degree()) });
    }
    let mut cons = Vec::with_capacity(constraints.len());
    for c in constraints {
        check_constraint(&c.g, n)?;
        if half_degree(&c.g) > d {
            return Err(Error::OrderTooSmall { order: d, reason: format!("a constraint has degree {}", c.g.degree()) });
        }
        let vars = normalize_set(&c.vars, n)?;
        if c.g.support_vars().iter().any(|v| vars.binary_search(v).is_err()) {
            return Err(Error::Invalid("constraint involves variables outside its index set".into()));
        }
        cons.push((&c.g, vars));
    }
    let cliques: Vec<Vec<usize>> = match cliques {
        Some(cs) => cs.iter().map(|c| normalize_set(c, n)).collect::<Result<_>>()?,
        None => chordal_cliques(&csp_graph(f, constraints)),
    };
    if cliques.iter().any(|c| c.is_empty()) {
        return Err(Error::Invalid("empty clique".into()));
    }

    let one = Polynomial::constant(n, 1.0);
    let mut blocks: Vec<(&Polynomial, Vec<MultiIndex>)> = Vec::new();
    for c in &cliques {
        blocks.push((&one, local_basis(n, c, d)));
    }
    for (g, vars) in &cons {
        blocks.push((g, local_basis(n, vars, d - half_degree(g))));
    }

    let zero = MultiIndex::zeros(n);
    let mut c_entries = Vec::new();
    let mut by_label: HashMap<MultiIndex, Vec<Entry>> = HashMap::new();
    for (blk, (g, basis)) in blocks.iter().enumerate() {
        for i in 0..basis.len() {
            for j in i..basis.len() {
                let bij = basis[i].add(&basis[j]);
                for (gamma, c) in g.terms() {
                    let alpha = bij.add(gamma);
                    let e = Entry::new(blk, i, j, c);
                    if alpha == zero {
                        c_entries.push(e);
                    } else {
                        by_label.entry(alpha).or_default().push(e);
                    }
                }
            }
        }
    }
    let mut labels: Vec<MultiIndex> = by_label.keys().cloned().collect();
    labels.sort();
    let row: HashMap<&MultiIndex, usize> = labels.iter().enumerate().map(|(k, a)| (a, k)).collect();
    let mut b = vec![0.0; labels.len()];
    for (alpha, c) in f.terms() {
        if alpha.is_zero() {
            continue;
        }
        match row.get(alpha) {
            Some(&k) => b[k] = c,
            None => return Err(Error::Uncovered(alpha.to_string())),
        }
    }
    let rows: Vec<Option<usize>> = (0..n).map(|i| row.get(&MultiIndex::unit(n, i)).copied()).collect();
    let buckets: Vec<Vec<Entry>> = labels.iter().map(|a| by_label.remove(a).unwrap_or_default()).collect();

    let cone = ConeSpec::new(blocks.iter().map(|(_, basis)| basis.len()).collect())?;
    let c = ConstraintMatrix::accumulate(c_entries)?.to_dense(&cone);
    let constraints = finish_constraints(buckets)?;
    let problem = ConicSdpProblem::new(cone, c, constraints, b, labels)?;
    let gram = problem.gram_diag();
    Ok(RelaxationArtifact {
        problem,
        meta: ArtifactMeta {
            family: Family::SparseLasserre,
            bound_offset: f.constant_term(),
            odd_scale: None,
            precond: PrecondPayload::DiagonalOfGram { d: gram },
            schema: ExtractionSchema::Sparse { n, rows, clique_blocks: (0..cliques.len()).collect() },
            cliques,
        },
    })
}

fn normalize_set(vars: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut v = vars.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&i| i >= n) {
        return Err(Error::Invalid(format!("variable index {bad} out of range for {n} variables")));
    }
    Ok(v)
}
