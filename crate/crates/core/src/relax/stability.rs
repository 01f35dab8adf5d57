use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::poly::{MultiIndex, Polynomial};

/// `Σ x_i⁴ + 2 Σ_{ij ∈ E} x_i²x_j²`, whose minimum on the unit sphere is
/// `1/α(G)`.
///
/// Vertices are `0..n`.
pub fn stability_polynomial(edges: &[(usize, usize)], n: usize) -> Result<Polynomial> {
    if n == 0 {
        return Err(Error::Graph("graph has no vertices".into()));
    }
    let mut seen = BTreeSet::new();
    let mut f = Polynomial::zero(n);
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 4;
        f.add_term(MultiIndex::new(e), 1.0);
    }
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::Graph(format!("edge ({a}, {b}) has a vertex outside 0..{n}")));
        }
        if a == b {
            return Err(Error::Graph(format!("self-loop at vertex {a}")));
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(Error::Graph(format!("duplicate edge ({a}, {b})")));
        }
        let mut e = vec![0; n];
        e[a] = 2;
        e[b] = 2;
        f.add_term(MultiIndex::new(e), 2.0);
    }
    Ok(f)
}
