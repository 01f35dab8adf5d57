use std::sync::Arc;

use super::MultiIndex;
use crate::error::{Error, Result};

/// `C(n, k)` in exact integer arithmetic.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Pascal triangle used for constant-time ranking of multi-indices.
#[derive(Debug)]
struct Pascal {
    rows: Vec<Vec<u64>>,
}

impl Pascal {
    fn new(max: usize) -> Self {
        let mut rows = Vec::with_capacity(max + 1);
        for n in 0..=max {
            let mut row = vec![0u64; n + 1];
            row[0] = 1;
            row[n] = 1;
            for k in 1..n {
                let prev: &Vec<u64> = &rows[n - 1];
                row[k] = prev[k - 1] + prev[k];
            }
            rows.push(row);
        }
        Pascal { rows }
    }

    #[inline]
    fn c(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.rows[n][k]
        }
    }
}

/// Graded monomial basis: either `[x]_d` (all degrees `≤ d`) or `[x^d]`
/// (degree exactly `d`).
///
/// Entries are listed in graded order with `x1` heaviest inside each grade,
/// matching `[1, x1, …, xn, x1², x1x2, …, xn^d]`.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    n: usize,
    d: u32,
    exact: bool,
    entries: Vec<MultiIndex>,
    pascal: Arc<Pascal>,
}

impl MonomialBasis {
    /// `[x]_d`: all monomials of degree at most `d`; length `C(n+d, d)`.
    pub fn up_to(n: usize, d: u32) -> Self {
        assert!(n >= 1, "a basis needs at least one variable");
        let mut entries = Vec::with_capacity(binomial((n + d as usize) as u64, d as u64) as usize);
        for k in 0..=d {
            push_grade(n, k, &mut entries);
        }
        MonomialBasis { n, d, exact: false, entries, pascal: Arc::new(Pascal::new(n + 2 * d as usize + 2)) }
    }

    /// `[x^d]`: monomials of degree exactly `d`; length `C(n+d-1, d)`.
    pub fn exact(n: usize, d: u32) -> Self {
        assert!(n >= 1, "a basis needs at least one variable");
        let mut entries = Vec::new();
        push_grade(n, d, &mut entries);
        MonomialBasis { n, d, exact: true, entries, pascal: Arc::new(Pascal::new(n + 2 * d as usize + 2)) }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[MultiIndex] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &MultiIndex {
        &self.entries[i]
    }

    /// Position of `alpha` in this basis.
    pub fn index_of(&self, alpha: &MultiIndex) -> Result<usize> {
        if alpha.nvars() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: alpha.nvars() });
        }
        let k = alpha.degree();
        let in_range = if self.exact { k == self.d } else { k <= self.d };
        if !in_range {
            return Err(Error::NotInBasis(alpha.to_string()));
        }
        Ok(self.rank_exps(alpha.exponents().iter().copied()))
    }

    /// Position of `a + b` without allocating the sum.
    ///
    /// The caller guarantees that the sum lies in the basis degree range;
    /// this is the hot path of relaxation assembly.
    pub fn index_of_sum(&self, a: &MultiIndex, b: &MultiIndex) -> usize {
        self.rank_exps(a.exponents().iter().zip(b.exponents()).map(|(x, y)| x + y))
    }

    /// Position of the monomial with exponents `e`, or `None` when its
    /// degree falls outside the basis.
    pub fn rank_of(&self, e: &[u32]) -> Option<usize> {
        debug_assert_eq!(e.len(), self.n);
        let k: u32 = e.iter().sum();
        let in_range = if self.exact { k == self.d } else { k <= self.d };
        in_range.then(|| self.rank_exps(e.iter().copied()))
    }

    fn rank_exps<I>(&self, exps: I) -> usize
    where
        I: Iterator<Item = u32> + Clone,
    {
        let k: u32 = exps.clone().sum();
        let offset = if self.exact || k == 0 {
            0
        } else {
            // monomials of degree < k in n variables
            self.pascal.c(self.n + k as usize - 1, self.n)
        };
        offset as usize + self.rank_in_grade(exps, k)
    }

    // Number of degree-k monomials preceding α in lex order (x1 heaviest):
    // at position i, every β with β_i > α_i (same prefix) comes first, and
    // there are C(rem - α_i - 1 + t, t) of those, t = variables after i.
    fn rank_in_grade<I>(&self, exps: I, k: u32) -> usize
    where
        I: Iterator<Item = u32>,
    {
        let mut rem = k as usize;
        let mut pos = 0u64;
        for (i, a) in exps.enumerate() {
            let a = a as usize;
            let t = self.n - i - 1;
            if t == 0 {
                break;
            }
            if rem > a {
                pos += self.pascal.c(rem - a - 1 + t, t);
            }
            rem -= a;
        }
        pos as usize
    }
}

fn push_grade(n: usize, k: u32, out: &mut Vec<MultiIndex>) {
    let mut cur = vec![0u32; n];
    fill(0, k, &mut cur, out);
}

fn fill(i: usize, rem: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    let n = cur.len();
    if i == n - 1 {
        cur[i] = rem;
        out.push(MultiIndex::new(cur.clone()));
        return;
    }
    for e in (0..=rem).rev() {
        cur[i] = e;
        fill(i + 1, rem - e, cur, out);
    }
    cur[i] = 0;
}
