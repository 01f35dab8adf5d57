use crate::cone::{BlockSymMatrix, ConeSpec};
use crate::error::{Error, Result};
use crate::poly::{MonomialBasis, Polynomial};
use crate::sdp::{ConicSdpProblem, Entry};

use super::{corner, finish_constraints, ArtifactMeta, ExtractionSchema, Family, PrecondPayload, RelaxationArtifact};

/// SOS relaxation of `min f(x)` over `ℝⁿ`.
///
/// One block indexed by `[x]_d`; one constraint per nonconstant monomial of
/// degree `≤ 2d`. The constraint matrices are 0/1 with disjoint supports, so
/// `AA*` is diagonal.
pub fn build_unconstrained(f: &Polynomial) -> Result<RelaxationArtifact> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let deg = f.degree();
    if deg % 2 == 1 {
        return Err(Error::OddDegree(deg));
    }
    if deg == 0 {
        return Err(Error::Invalid("constant polynomial has no relaxation".into()));
    }
    let n = f.nvars();
    let d = deg / 2;
    let basis = MonomialBasis::up_to(n, d);
    let big = MonomialBasis::up_to(n, 2 * d);
    let nb = basis.len();

    let mut buckets: Vec<Vec<Entry>> = vec![Vec::new(); big.len()];
    for i in 0..nb {
        for j in i..nb {
            let k = big.index_of_sum(basis.get(i), basis.get(j));
            buckets[k].push(Entry::new(0, i, j, 1.0));
        }
    }
    // the constant monomial only occurs at (0, 0): that is C
    buckets.remove(0);

    let a: Vec<f64> = buckets.iter().map(|es| 1.0 / es.iter().map(|e| e.mult()).sum::<f64>()).collect();
    let mut b = vec![0.0; big.len() - 1];
    for (alpha, c) in f.terms() {
        if !alpha.is_zero() {
            b[big.index_of(alpha)? - 1] = c;
        }
    }
    let labels = big.entries()[1..].to_vec();
    let constraints = finish_constraints(buckets)?;
    let cone = ConeSpec::new(vec![nb])?;
    let c = BlockSymMatrix::from_blocks(vec![corner(nb)])?;
    let problem = ConicSdpProblem::new(cone, c, constraints, b, labels)?;
    Ok(RelaxationArtifact {
        problem,
        meta: ArtifactMeta {
            family: Family::Unconstrained,
            bound_offset: f.constant_term(),
            odd_scale: None,
            precond: PrecondPayload::ExactDiagonal { a },
            schema: ExtractionSchema::Dense { n, d },
            cliques: Vec::new(),
        },
    })
}
