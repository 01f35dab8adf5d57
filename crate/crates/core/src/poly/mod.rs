//! Multi-indices, graded monomial bases and sparse real polynomials.
//!
//! Every assembly routine in [`crate::relax`] speaks this vocabulary: a
//! monomial `x^α` is a [`MultiIndex`], a polynomial is a sparse map from
//! multi-indices to coefficients, and `[x]_d` / `[x^d]` are
//! [`MonomialBasis`] values in graded order.

mod basis;
mod text;

pub use basis::{binomial, MonomialBasis};
pub use text::{format_polynomial, parse_polynomial, parse_polynomial_sections};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent vector of a monomial.
///
/// Ordered by the graded order used throughout the crate: total degree
/// first, then lexicographically with `x1` heaviest, so that
/// `1 < x1 < x2 < … < x1² < x1x2 < …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The exponent vector of `x_i` (0-based `i`).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Exponent of the product `x^self · x^other`.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.nvars(), other.nvars());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Evaluates `x^self`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).filter(|(&e, _)| e > 0).map(|(&e, &xi)| xi.powi(e as i32)).product()
    }

    pub fn is_even(&self) -> bool {
        self.0.iter().all(|e| e % 2 == 0)
    }

    /// `α/2`, only meaningful when every exponent is even.
    pub fn half(&self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|e| e / 2).collect())
    }

    /// Multinomial coefficient `|α|! / (α1! ⋯ αn!)`.
    pub fn multinomial(&self) -> u64 {
        let mut acc: u64 = 1;
        let mut partial = 0u64;
        for &e in &self.0 {
            partial += e as u64;
            acc *= binomial(partial, e as u64);
        }
        acc
    }

    /// Appends a trailing exponent (used to adjoin an extra variable).
    pub fn extended(&self, last: u32) -> MultiIndex {
        let mut e = self.0.clone();
        e.push(last);
        MultiIndex(e)
    }

    /// Removes the exponent of variable `i`.
    pub fn without(&self, i: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e.remove(i);
        MultiIndex(e)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Sparse polynomial in `n` real variables with `f64` coefficients.
///
/// Zero coefficients are never stored; cancellation in arithmetic removes
/// the term. No epsilon pruning is performed.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Polynomial::zero(n);
        p.add_term(MultiIndex::zeros(n), c);
        p
    }

    /// The coordinate polynomial `x_i` (0-based).
    pub fn var(n: usize, i: usize) -> Self {
        let mut p = Polynomial::zero(n);
        p.add_term(MultiIndex::unit(n, i), 1.0);
        p
    }

    pub fn monomial(alpha: MultiIndex, c: f64) -> Self {
        let mut p = Polynomial::zero(alpha.nvars());
        p.add_term(alpha, c);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        let mut p = Polynomial::zero(n);
        for (alpha, c) in terms {
            if alpha.nvars() != n {
                return Err(Error::DimensionMismatch { expected: n, found: alpha.nvars() });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    /// Adds `c·x^α`, dropping the term if it cancels exactly.
    pub fn add_term(&mut self, alpha: MultiIndex, c: f64) {
        assert_eq!(alpha.nvars(), self.n, "multi-index length mismatch");
        if c == 0.0 {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(v) => {
                *v += c;
                if *v == 0.0 {
                    self.terms.remove(&alpha);
                }
            }
            None => {
                self.terms.insert(alpha, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.terms.iter().map(|(a, &c)| (a, c))
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> f64 {
        self.terms.get(alpha).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coeff(&MultiIndex::zeros(self.n))
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.keys().all(|a| a.degree() == d)
    }

    /// Variables that appear with a positive exponent in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        let mut used = vec![false; self.n];
        for a in self.terms.keys() {
            for (i, &e) in a.exponents().iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        (0..self.n).filter(|&i| used[i]).collect()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        Ok(self.terms.iter().map(|(a, c)| c * a.eval(x)).sum())
    }

    pub fn multiply(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same(other)?;
        let mut out = Polynomial::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.add(b), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (b, &cb) in &other.terms {
            out.add_term(b.clone(), cb);
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (a, &c) in &self.terms {
            out.add_term(a.clone(), s * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::constant(self.n, 1.0);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `∂f/∂x_i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (a, &c) in &self.terms {
            let k = a.exponents()[i];
            if k > 0 {
                let mut e = a.exponents().to_vec();
                e[i] -= 1;
                out.add_term(MultiIndex::new(e), c * k as f64);
            }
        }
        out
    }

    /// Re-embeds the polynomial into `m ≥ n` variables, mapping local
    /// variable `i` to global variable `positions[i]`.
    pub fn embed(&self, m: usize, positions: &[usize]) -> Result<Polynomial> {
        if positions.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: positions.len() });
        }
        let mut out = Polynomial::zero(m);
        for (a, &c) in &self.terms {
            let mut e = vec![0u32; m];
            for (i, &p) in positions.iter().enumerate() {
                if p >= m {
                    return Err(Error::Invalid(format!("variable index {p} out of range")));
                }
                e[p] += a.exponents()[i];
            }
            out.add_term(MultiIndex::new(e), c);
        }
        Ok(out)
    }

    fn check_same(&self, other: &Polynomial) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("polynomial variable counts differ")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(&rhs.scale(-1.0)).expect("polynomial variable counts differ")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.multiply(rhs).expect("polynomial variable counts differ")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Add<f64> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: f64) -> Polynomial {
        self + &Polynomial::constant(self.n, rhs)
    }
}

impl Sub<f64> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: f64) -> Polynomial {
        self + &Polynomial::constant(self.n, -rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    /// Naive evaluator written against the definition, independent of
    /// `MultiIndex::eval`.
    fn eval_naive(p: &Polynomial, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (a, c) in p.terms() {
            let mut m = 1.0;
            for (i, &e) in a.exponents().iter().enumerate() {
                for _ in 0..e {
                    m *= x[i];
                }
            }
            total += c * m;
        }
        total
    }

    #[test]
    fn graded_order_matches_notation() {
        let mut v = vec![mi(&[0, 2]), mi(&[1, 0]), mi(&[0, 0]), mi(&[1, 1]), mi(&[2, 0]), mi(&[0, 1])];
        v.sort();
        assert_eq!(v, vec![mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1]), mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])]);
    }

    #[test]
    fn eval_examples() {
        let x1 = Polynomial::var(2, 0);
        let x2 = Polynomial::var(2, 1);
        let p = &(&x1 * &x1) + &(&x1 * &x2).scale(2.0);
        assert_eq!(p.eval(&[1.0, 1.0]).unwrap(), 3.0);
        let c = Polynomial::constant(3, 5.0);
        assert_eq!(c.eval(&[0.3, -2.0, 7.0]).unwrap(), 5.0);
        assert!(matches!(p.eval(&[1.0]), Err(Error::DimensionMismatch { expected: 2, found: 1 })));
    }

    #[test]
    fn multiply_examples() {
        let x1 = Polynomial::var(2, 0);
        let x2 = Polynomial::var(2, 1);
        assert_eq!(x1.multiply(&x1).unwrap(), Polynomial::monomial(mi(&[2, 0]), 1.0));
        let diff = &x1 - &x2;
        let sum = &x1 + &x2;
        let prod = diff.multiply(&sum).unwrap();
        let expect = Polynomial::from_terms(2, [(mi(&[2, 0]), 1.0), (mi(&[0, 2]), -1.0)]).unwrap();
        assert_eq!(prod, expect);
        assert_eq!(prod.len(), 2, "cross terms must cancel");
        assert!(x1.multiply(&Polynomial::var(3, 0)).is_err());
    }

    #[test]
    fn multinomial_coefficients() {
        assert_eq!(mi(&[2, 0]).multinomial(), 1);
        assert_eq!(mi(&[1, 1]).multinomial(), 2);
        assert_eq!(mi(&[1, 1, 1]).multinomial(), 6);
        assert_eq!(mi(&[2, 1]).multinomial(), 3);
    }

    #[test]
    fn homogeneity_and_degree() {
        let p = Polynomial::from_terms(2, [(mi(&[3, 1]), 1.0), (mi(&[0, 4]), -2.0)]).unwrap();
        assert!(p.is_homogeneous());
        assert_eq!(p.degree(), 4);
        let q = &p + 1.0;
        assert!(!q.is_homogeneous());
        assert_eq!(Polynomial::zero(2).degree(), 0);
    }

    fn sparse_poly(n: usize) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((prop::collection::vec(0u32..3, n), -3.0f64..3.0), 0..7).prop_map(move |terms| {
            Polynomial::from_terms(n, terms.into_iter().map(|(e, c)| (MultiIndex::new(e), c))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn eval_matches_naive(p in sparse_poly(3), x in prop::collection::vec(-2.0f64..2.0, 3)) {
            let a = p.eval(&x).unwrap();
            let b = eval_naive(&p, &x);
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }

        #[test]
        fn multiply_is_commutative(p in sparse_poly(3), q in sparse_poly(3)) {
            let pq = p.multiply(&q).unwrap();
            let qp = q.multiply(&p).unwrap();
            prop_assert_eq!(pq.len(), qp.len());
            for (a, c) in pq.terms() {
                let d = qp.coeff(a);
                prop_assert!((c - d).abs() <= 1e-12 * (1.0 + c.abs()));
            }
        }

        #[test]
        fn multiply_is_associative(p in sparse_poly(3), q in sparse_poly(3), r in sparse_poly(3)) {
            let left = p.multiply(&q).unwrap().multiply(&r).unwrap();
            let right = p.multiply(&q.multiply(&r).unwrap()).unwrap();
            for (a, c) in left.terms() {
                prop_assert!((c - right.coeff(a)).abs() <= 1e-10 * (1.0 + c.abs()));
            }
            for (a, c) in right.terms() {
                prop_assert!((c - left.coeff(a)).abs() <= 1e-10 * (1.0 + c.abs()));
            }
        }

        #[test]
        fn derivative_matches_central_difference(p in sparse_poly(3),
                                                 x in prop::collection::vec(-1.0f64..1.0, 3)) {
            let h = 1e-5;
            for i in 0..3 {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[i] += h;
                xm[i] -= h;
                let fd = (eval_naive(&p, &xp) - eval_naive(&p, &xm)) / (2.0 * h);
                let d = p.derivative(i).eval(&x).unwrap();
                prop_assert!((d - fd).abs() <= 1e-5 * (1.0 + fd.abs()));
            }
        }

        #[test]
        fn multiply_respects_evaluation(p in sparse_poly(3), q in sparse_poly(3),
                                        x in prop::collection::vec(-1.5f64..1.5, 3)) {
            let lhs = p.multiply(&q).unwrap().eval(&x).unwrap();
            let rhs = eval_naive(&p, &x) * eval_naive(&q, &x);
            // relative to the magnitude of the summands, so cancellation is not penalized
            let mag = |r: &Polynomial| r.terms().map(|(a, c)| (c * a.eval(&x)).abs()).sum::<f64>();
            let scale = 1.0 + mag(&p) * mag(&q);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }
    }
}
