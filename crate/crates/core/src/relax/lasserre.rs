use crate::cone::ConeSpec;
use crate::error::{Error, Result};
use crate::poly::{MonomialBasis, Polynomial};
use crate::sdp::{ConicSdpProblem, ConstraintMatrix, Entry};

use super::{
    check_constraint, finish_constraints, half_degree, ArtifactMeta, ExtractionSchema, Family, PrecondPayload,
    RelaxationArtifact,
};

/// Order-`d` Lasserre relaxation of `min f(x)` subject to `g_i(x) ≥ 0`.
///
/// Block `i` is indexed by `[x]_{d−d_i}` with `d_i = ⌈deg g_i / 2⌉` and
/// `g_0 = 1`; block 0 is the moment matrix.
pub fn build_lasserre(f: &Polynomial, g: &[Polynomial], d: u32) -> Result<RelaxationArtifact> {
    let n = f.nvars();
    if d == 0 {
        return Err(Error::OrderTooSmall { order: d, reason: "the order must be at least 1".into() });
    }
    if f.degree() > 2 * d {
        return Err(Error::OrderTooSmall { order: d, reason: format!("objective has degree {}", f.degree()) });
    }
    for gi in g {
        check_constraint(gi, n)?;
        if half_degree(gi) > d {
            return Err(Error::OrderTooSmall { order: d, reason: format!("a constraint has degree {}", gi.degree()) });
        }
    }

    let big = MonomialBasis::up_to(n, 2 * d);
    let one = Polynomial::constant(n, 1.0);
    let weights: Vec<&Polynomial> = std::iter::once(&one).chain(g).collect();
    let mut buckets: Vec<Vec<Entry>> = vec![Vec::new(); big.len()];
    let mut sizes = Vec::with_capacity(weights.len());
    let mut scratch = vec![0u32; n];
    for (blk, gi) in weights.iter().enumerate() {
        let basis = MonomialBasis::up_to(n, d - half_degree(gi));
        let nb = basis.len();
        sizes.push(nb);
        let terms: Vec<_> = gi.terms().collect();
        for i in 0..nb {
            for j in i..nb {
                let (bi, bj) = (basis.get(i).exponents(), basis.get(j).exponents());
                for (gamma, c) in &terms {
                    for (k, s) in scratch.iter_mut().enumerate() {
                        *s = bi[k] + bj[k] + gamma.exponents()[k];
                    }
                    let k = big.rank_of(&scratch).expect("degree bounded by 2d");
                    buckets[k].push(Entry::new(blk, i, j, *c));
                }
            }
        }
    }

    let cone = ConeSpec::new(sizes)?;
    let c = ConstraintMatrix::accumulate(buckets.remove(0))?.to_dense(&cone);
    let mut b = vec![0.0; big.len() - 1];
    for (alpha, c) in f.terms() {
        if !alpha.is_zero() {
            b[big.index_of(alpha)? - 1] = c;
        }
    }
    let labels = big.entries()[1..].to_vec();
    let constraints = finish_constraints(buckets)?;
    let problem = ConicSdpProblem::new(cone, c, constraints, b, labels)?;
    let gram = problem.gram_diag();
    Ok(RelaxationArtifact {
        problem,
        meta: ArtifactMeta {
            family: Family::Lasserre,
            bound_offset: f.constant_term(),
            odd_scale: None,
            precond: PrecondPayload::DiagonalOfGram { d: gram },
            schema: ExtractionSchema::Dense { n, d },
            cliques: Vec::new(),
        },
    })
}
