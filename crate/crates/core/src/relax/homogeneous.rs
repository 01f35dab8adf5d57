use crate::cone::{BlockSymMatrix, ConeSpec};
use crate::error::{Error, Result};
use crate::poly::{MonomialBasis, MultiIndex, Polynomial};
use crate::sdp::{ConicSdpProblem, Entry};

use super::{corner, finish_constraints, ArtifactMeta, ExtractionSchema, Family, PrecondPayload, RelaxationArtifact};

/// SOS relaxation of `min f(x)` over the unit sphere for a form of even
/// degree `2d`, via `f(x) − γ(xᵀx)^d` SOS.
///
/// One block indexed by `[x^d]`; constraints are labeled by the degree-`2d`
/// monomials other than `x1^{2d}`, which is the first basis product and
/// becomes `C`.
pub fn build_homogeneous(f: &Polynomial) -> Result<RelaxationArtifact> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let deg = f.degree();
    if deg % 2 == 1 {
        return Err(Error::OddDegree(deg));
    }
    if deg == 0 {
        return Err(Error::Invalid("constant polynomial has no relaxation".into()));
    }
    let n = f.nvars();
    if n < 2 {
        return Err(Error::Invalid("a form in one variable has no constraints on the sphere".into()));
    }
    let d = deg / 2;
    let basis = MonomialBasis::exact(n, d);
    let big = MonomialBasis::exact(n, 2 * d);
    let nb = basis.len();

    let mut buckets: Vec<Vec<Entry>> = vec![Vec::new(); big.len()];
    for i in 0..nb {
        for j in i..nb {
            let k = big.index_of_sum(basis.get(i), basis.get(j));
            buckets[k].push(Entry::new(0, i, j, 1.0));
        }
    }
    // x1^{2d} only occurs at (0, 0): that is C
    buckets.remove(0);
    let labels: Vec<MultiIndex> = big.entries()[1..].to_vec();

    let r: Vec<f64> = labels.iter().map(|a| if a.is_even() { a.half().multinomial() as f64 } else { 0.0 }).collect();
    let h: Vec<f64> = buckets.iter().map(|es| 1.0 / es.iter().map(|e| e.mult()).sum::<f64>()).collect();
    let s = 1.0 + r.iter().zip(&h).map(|(r, h)| r * r * h).sum::<f64>();
    let p: Vec<f64> = r.iter().zip(&h).map(|(r, h)| h * r / s.sqrt()).collect();

    for (es, &rk) in buckets.iter_mut().zip(&r) {
        if rk != 0.0 {
            es.push(Entry::new(0, 0, 0, -rk));
        }
    }
    let lead = f.coeff(big.get(0));
    let mut b = vec![0.0; labels.len()];
    for (alpha, c) in f.terms() {
        let k = big.index_of(alpha)?;
        if k > 0 {
            b[k - 1] = c;
        }
    }
    for (bk, &rk) in b.iter_mut().zip(&r) {
        *bk -= rk * lead;
    }

    let constraints = finish_constraints(buckets)?;
    let cone = ConeSpec::new(vec![nb])?;
    let c = BlockSymMatrix::from_blocks(vec![corner(nb)])?;
    let problem = ConicSdpProblem::new(cone, c, constraints, b, labels)?;
    Ok(RelaxationArtifact {
        problem,
        meta: ArtifactMeta {
            family: Family::Homogeneous,
            bound_offset: lead,
            odd_scale: None,
            precond: PrecondPayload::DiagMinusRankOne { h, p },
            schema: ExtractionSchema::Homogeneous { n, d },
            cliques: Vec::new(),
        },
    })
}

/// Factor relating the sphere minimum of an odd form of degree `2d − 1` to
/// that of `f(x)·t`.
pub fn odd_scale(d: u32) -> f64 {
    let d = d as f64;
    (2.0 * d - 1.0).sqrt() * (1.0 - 1.0 / (2.0 * d)).powf(-d)
}

/// Lifts an odd form `f` of degree `2d − 1` to the even form `f(x)·t` in one
/// more variable (`t` last), returning it with the bound scale factor.
pub fn odd_to_even(f: &Polynomial) -> Result<(Polynomial, f64)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let deg = f.degree();
    if deg.is_multiple_of(2) {
        return Err(Error::EvenDegree(deg));
    }
    let fhat = Polynomial::from_terms(f.nvars() + 1, f.terms().map(|(a, c)| (a.extended(1), c)))?;
    Ok((fhat, odd_scale(deg.div_ceil(2))))
}
