//! Minimizer recovery from solved relaxations.
//!
//! The moment block of the dual slack `Z` is inspected in three stages:
//! a rank-one test, the flat extension test with atom extraction, and
//! finally a direct read-off that is never certified.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{sym_eigen, BlockSymMatrix};
use crate::error::{Error, Result};
use crate::poly::{MonomialBasis, MultiIndex, Polynomial};
use crate::relax::{ExtractionSchema, Family, RelaxationArtifact};

pub const DEFAULT_RANK_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtractionMethod {
    RankOne,
    FlatExtension,
    Fallback,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    /// Eigenvalues below `rank_tol·λ₁` count as zero.
    pub rank_tol: f64,
    /// Largest relative error accepted for a certificate.
    pub cert_tol: f64,
    /// Slack allowed in `g_i(x) ≥ 0`.
    pub feas_tol: f64,
    /// Seed for the random combination of multiplication matrices.
    pub seed: u64,
    /// Polish unconstrained minimizers with local Newton steps on `f`.
    pub refine: bool,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig { rank_tol: DEFAULT_RANK_TOL, cert_tol: 1e-5, feas_tol: 1e-6, seed: 0, refine: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub method: ExtractionMethod,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Largest relative error over the returned points.
    pub err: f64,
    pub feasible: bool,
    pub certified: bool,
    /// Numerical rank of the moment block (largest over clique blocks).
    pub rank: usize,
    /// Whether the points were polished by [`refine_local`].
    pub refined: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// A point mass of a finitely atomic measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub point: Vec<f64>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FlatOutcome {
    Flat(Vec<Atom>),
    NotFlat { rank: usize, rank_lower: usize },
    Failed(String),
}

/// `|f(x) − f_sos| / max(1, |f(x)|)`.
pub fn relative_error(f: &Polynomial, x: &[f64], f_sos: f64) -> Result<f64> {
    let fx = f.eval(x)?;
    if !fx.is_finite() || !f_sos.is_finite() {
        return Err(Error::Invalid(format!("non-finite value f(x) = {fx}, bound = {f_sos}")));
    }
    Ok((fx - f_sos).abs() / fx.abs().max(1.0))
}

/// Number of eigenvalues above `tol·λ₁`.
pub fn numerical_rank(values: &DVector<f64>, tol: f64) -> usize {
    let top = values.iter().fold(0.0f64, |a, &v| a.max(v));
    if top <= 0.0 {
        return 0;
    }
    values.iter().filter(|&&v| v > tol * top).count()
}

/// Reads `x` off a rank-one moment matrix indexed by `[x]_d`.
pub fn extract_rank_one(z: &DMatrix<f64>, n: usize, rank_tol: f64) -> Result<Option<Vec<f64>>> {
    let eig = sym_eigen(z)?;
    let l1 = eig.values[0];
    if l1 <= 0.0 || z.nrows() < n + 1 {
        return Ok(None);
    }
    if z.nrows() > 1 && eig.values[1] > rank_tol * l1 {
        return Ok(None);
    }
    let v = eig.vectors.column(0);
    if v[0].abs() < 1e-12 {
        return Ok(None);
    }
    Ok(Some((1..=n).map(|i| v[i] / v[0]).collect()))
}

/// `Z(1..=n, 0)`: the degree-one moments against the constant.
pub fn fallback_point(z: &DMatrix<f64>, n: usize) -> Vec<f64> {
    (1..=n).map(|i| if i < z.nrows() { z[(i, 0)] } else { 0.0 }).collect()
}

/// Scales a moment matrix indexed by `[x^d]` so the largest `x_p^{2d}`
/// diagonal becomes 1, returning the pivot `p`.
pub fn normalize_homogeneous(z: &DMatrix<f64>, n: usize, d: u32) -> Result<(DMatrix<f64>, usize)> {
    let basis = MonomialBasis::exact(n, d);
    if z.nrows() != basis.len() || !z.is_square() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: z.nrows() });
    }
    let (mut pivot, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..n {
        let k = pure_power(&basis, n, i, d);
        if z[(k, k)] > best {
            best = z[(k, k)];
            pivot = i;
        }
    }
    if !(best >= 1e-10) {
        return Err(Error::Invalid("moment matrix has no usable pivot diagonal".into()));
    }
    Ok((z / best, pivot))
}

fn pure_power(basis: &MonomialBasis, n: usize, i: usize, d: u32) -> usize {
    let mut e = vec![0; n];
    e[i] = d;
    basis.rank_of(&e).expect("pure power lies in the basis")
}

/// Re-indexes a `[x^d]` moment matrix as a `[v]_d` moment matrix in the
/// `n − 1` variables other than the pivot (`x_pivot = 1`).
pub fn dehomogenize(zhat: &DMatrix<f64>, n: usize, d: u32, pivot: usize) -> DMatrix<f64> {
    let src = MonomialBasis::exact(n, d);
    let dst = MonomialBasis::up_to(n - 1, d);
    let perm: Vec<usize> =
        src.entries().iter().map(|b| dst.index_of(&b.without(pivot)).expect("bijective reindexing")).collect();
    let s = perm.len();
    let mut out = DMatrix::zeros(s, s);
    for i in 0..s {
        for j in 0..s {
            out[(perm[i], perm[j])] = zhat[(i, j)];
        }
    }
    out
}

/// `(1 + ‖v‖²)^{−1/2}·(v with 1 inserted at the pivot)`.
pub fn rehomogenize(v: &[f64], pivot: usize) -> Vec<f64> {
    let mut x = v.to_vec();
    x.insert(pivot, 1.0);
    let s = (1.0 + v.iter().map(|t| t * t).sum::<f64>()).sqrt();
    x.iter().map(|t| t / s).collect()
}

/// Normalizes `Z(·, d·e_p)` restricted to `x_p^{d−1}x_i`, which is
/// proportional to `x`.
pub fn fallback_homogeneous(z: &DMatrix<f64>, n: usize, d: u32, pivot: usize) -> Vec<f64> {
    let basis = MonomialBasis::exact(n, d);
    let col = pure_power(&basis, n, pivot, d);
    let v: Vec<f64> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[pivot] = d - 1;
            e[i] += 1;
            z[(basis.rank_of(&e).expect("degree d"), col)]
        })
        .collect();
    let s = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    if s > 0.0 {
        v.iter().map(|t| t / s).collect()
    } else {
        v
    }
}

/// Flat extension test and atom extraction for a moment matrix indexed by
/// `[x]_d` with constant entry 1.
///
/// Truncations `M_t` (indexed by `[x]_t`) are tried for `t = d, d−1, …, 1`;
/// the first with `rank M_t = rank M_{t−1}` whose atoms reproduce `M_t`
/// wins. Ranks use the threshold `rank_tol·λ₁(Zhat)` throughout.
pub fn extract_flat(zhat: &DMatrix<f64>, n: usize, d: u32, rank_tol: f64, seed: u64) -> Result<FlatOutcome> {
    let s = MonomialBasis::up_to(n, d).len();
    if zhat.nrows() != s || !zhat.is_square() {
        return Err(Error::DimensionMismatch { expected: s, found: zhat.nrows() });
    }
    if d == 0 {
        return Ok(FlatOutcome::Failed("order 0 carries no first moments".into()));
    }
    let thresh = rank_tol * sym_eigen(zhat)?.values[0];
    let mut ranks = Vec::with_capacity(d as usize + 1);
    for t in 0..=d {
        let k = MonomialBasis::up_to(n, t).len();
        let sub = zhat.view((0, 0), (k, k)).into_owned();
        ranks.push(sym_eigen(&sub)?.values.iter().filter(|&&v| v > thresh).count());
    }
    let mut failure = None;
    for t in (1..=d).rev() {
        let (r, r_lower) = (ranks[t as usize], ranks[t as usize - 1]);
        if r == 0 || r != r_lower {
            continue;
        }
        let k = MonomialBasis::up_to(n, t).len();
        let mt = zhat.view((0, 0), (k, k)).into_owned();
        match atoms_from_truncation(&mt, n, t, r, seed)? {
            Ok(atoms) => return Ok(FlatOutcome::Flat(atoms)),
            Err(msg) => failure = failure.or(Some(msg)),
        }
    }
    Ok(match failure {
        Some(msg) => FlatOutcome::Failed(msg),
        None => FlatOutcome::NotFlat { rank: ranks[d as usize], rank_lower: ranks[d as usize - 1] },
    })
}

fn atoms_from_truncation(
    mt: &DMatrix<f64>,
    n: usize,
    t: u32,
    r: usize,
    seed: u64,
) -> Result<std::result::Result<Vec<Atom>, String>> {
    let basis = MonomialBasis::up_to(n, t);
    let s = basis.len();
    let lower = MonomialBasis::up_to(n, t - 1).len();
    let eig = sym_eigen(mt)?;

    // Mt ≈ V Vᵀ
    let v = DMatrix::from_fn(s, r, |i, j| eig.vectors[(i, j)] * eig.values[j].max(0.0).sqrt());

    // greedy pivot rows among monomials of degree ≤ t−1
    let scale = (0..lower).map(|i| v.row(i).norm()).fold(0.0f64, f64::max);
    let mut pivots: Vec<usize> = Vec::with_capacity(r);
    let mut q: Vec<DVector<f64>> = Vec::with_capacity(r);
    for i in 0..lower {
        if pivots.len() == r {
            break;
        }
        let mut w = v.row(i).transpose();
        for b in &q {
            let c = b.dot(&w);
            w -= b * c;
        }
        let nw = w.norm();
        if nw > 1e-6 * scale {
            q.push(w / nw);
            pivots.push(i);
        }
    }
    if pivots.len() < r {
        return Ok(Err(format!("found {} of {r} independent pivot rows", pivots.len())));
    }
    let vb = DMatrix::from_fn(r, r, |i, j| v[(pivots[i], j)]);
    let vb_inv = match vb.try_inverse() {
        Some(m) => m,
        None => return Ok(Err("pivot block is singular".into())),
    };
    let u = &v * vb_inv;

    let mults: Vec<DMatrix<f64>> = (0..n)
        .map(|k| {
            DMatrix::from_fn(r, r, |i, j| {
                let b = basis.get(pivots[i]);
                u[(basis.index_of_sum(b, &MultiIndex::unit(n, k)), j)]
            })
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = lambda.iter().sum();
    let mut combo = DMatrix::zeros(r, r);
    for (m, l) in mults.iter().zip(&lambda) {
        combo += m * (l / total);
    }
    let (qs, _) = nalgebra::linalg::Schur::new(combo).unpack();
    let points: Vec<Vec<f64>> = (0..r)
        .map(|j| {
            let qj = qs.column(j);
            mults.iter().map(|m| qj.dot(&(m * qj))).collect()
        })
        .collect();
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Ok(Err("non-finite atom coordinates".into()));
    }

    // weights from the first column, then check the whole truncation
    let a = DMatrix::from_fn(s, r, |i, j| basis.get(i).eval(&points[j]));
    let rhs = mt.column(0).into_owned();
    let w = match a.clone().svd(true, true).solve(&rhs, 1e-14) {
        Ok(w) => w,
        Err(e) => return Ok(Err(format!("weight solve failed: {e}"))),
    };
    if w.iter().any(|&x| !(x > 0.0)) {
        return Ok(Err("nonpositive atom weight".into()));
    }
    let recon = &a * DMatrix::from_diagonal(&w) * a.transpose();
    let gap = (recon - mt).norm();
    if gap > 1e-5 * mt.norm().max(1.0) {
        return Ok(Err(format!("atoms reproduce the moment matrix only to {gap:.3e}")));
    }
    Ok(Ok(points.into_iter().zip(w.iter()).map(|(point, &weight)| Atom { point, weight }).collect()))
}

/// Everything needed to judge an extracted point.
pub struct Target<'a> {
    /// The objective in its original variables.
    pub f: &'a Polynomial,
    /// Constraints `g_i ≥ 0`, empty for unconstrained and sphere problems.
    pub g: &'a [Polynomial],
    pub f_sos: f64,
}

/// Recovers candidate minimizers from a solved relaxation.
///
/// `z` and `y` are the dual iterates of the solver. For builds of a lifted
/// odd form the points are mapped back to the original variables.
pub fn extract(
    art: &RelaxationArtifact,
    z: &BlockSymMatrix,
    y: &[f64],
    target: &Target<'_>,
    cfg: &ExtractionConfig,
) -> Result<ExtractionResult> {
    let mut diagnostic = None;
    let (method, mut points, weights, rank) = match &art.meta.schema {
        ExtractionSchema::Dense { n, d } => {
            let z0 = z.block(0);
            let rank = numerical_rank(&sym_eigen(z0)?.values, cfg.rank_tol);
            if let Some(x) = extract_rank_one(z0, *n, cfg.rank_tol)? {
                (ExtractionMethod::RankOne, vec![x], vec![1.0], rank)
            } else {
                let scale = z0[(0, 0)];
                let outcome = if scale > 0.0 {
                    extract_flat(&(z0 / scale), *n, *d, cfg.rank_tol, cfg.seed)?
                } else {
                    FlatOutcome::Failed("zero constant moment".into())
                };
                match outcome {
                    FlatOutcome::Flat(atoms) => {
                        let (p, w) = atoms.into_iter().map(|a| (a.point, a.weight)).unzip();
                        (ExtractionMethod::FlatExtension, p, w, rank)
                    }
                    other => {
                        diagnostic = Some(describe(&other));
                        (ExtractionMethod::Fallback, vec![fallback_point(z0, *n)], vec![1.0], rank)
                    }
                }
            }
        }
        ExtractionSchema::Homogeneous { n, d } => {
            let z0 = z.block(0);
            let rank = numerical_rank(&sym_eigen(z0)?.values, cfg.rank_tol);
            let (zn, pivot) = normalize_homogeneous(z0, *n, *d)?;
            let pivot_scale = {
                let basis = MonomialBasis::exact(*n, *d);
                let k = pure_power(&basis, *n, pivot, *d);
                z0[(k, k)]
            };
            let zd = dehomogenize(&zn, *n, *d, pivot);
            let nu =
                |v: &[f64], lam: f64| pivot_scale * lam * (1.0 + v.iter().map(|t| t * t).sum::<f64>()).powi(*d as i32);
            if let Some(v) = extract_rank_one(&zd, n - 1, cfg.rank_tol)? {
                let w = nu(&v, 1.0);
                (ExtractionMethod::RankOne, vec![rehomogenize(&v, pivot)], vec![w], rank)
            } else {
                match extract_flat(&zd, n - 1, *d, cfg.rank_tol, cfg.seed)? {
                    FlatOutcome::Flat(atoms) => {
                        let w = atoms.iter().map(|a| nu(&a.point, a.weight)).collect();
                        let p = atoms.iter().map(|a| rehomogenize(&a.point, pivot)).collect();
                        (ExtractionMethod::FlatExtension, p, w, rank)
                    }
                    other => {
                        diagnostic = Some(describe(&other));
                        let x = fallback_homogeneous(z0, *n, *d, pivot);
                        (ExtractionMethod::Fallback, vec![x], vec![1.0], rank)
                    }
                }
            }
        }
        ExtractionSchema::Sparse { n, rows, clique_blocks } => {
            let x: Vec<f64> = rows.iter().map(|r| r.map_or(0.0, |k| -y[k])).collect();
            debug_assert_eq!(x.len(), *n);
            let mut rank = 0;
            for &k in clique_blocks {
                rank = rank.max(numerical_rank(&sym_eigen(z.block(k))?.values, cfg.rank_tol));
            }
            let method = if rank == 1 {
                ExtractionMethod::RankOne
            } else {
                diagnostic = Some(format!("a clique moment block has numerical rank {rank}"));
                ExtractionMethod::Fallback
            };
            (method, vec![x], vec![1.0], rank)
        }
    };

    if art.meta.odd_scale.is_some() {
        points = points.iter().map(|p| lower_odd(p)).collect();
    }
    let refined = cfg.refine && art.meta.family == Family::Unconstrained;
    if refined {
        points = points.iter().map(|p| refine_local(target.f, p, 100)).collect::<Result<_>>()?;
    }
    let mut err = 0.0f64;
    let mut feasible = true;
    for p in &points {
        err = err.max(relative_error(target.f, p, target.f_sos)?);
        for g in target.g {
            if g.eval(p)? < -cfg.feas_tol {
                feasible = false;
            }
        }
    }
    let certified = method != ExtractionMethod::Fallback && err <= cfg.cert_tol && feasible;
    Ok(ExtractionResult { method, points, weights, err, feasible, certified, rank, refined, diagnostic })
}

/// Damped Newton iteration on `∇f = 0` started at `x0`.
///
/// A step is taken only if it does not increase `f` beyond roundoff and
/// strictly decreases `‖∇f‖`, so the result is never worse than `x0`.
pub fn refine_local(f: &Polynomial, x0: &[f64], max_iter: usize) -> Result<Vec<f64>> {
    let n = f.nvars();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x0.len() });
    }
    let grad: Vec<Polynomial> = (0..n).map(|i| f.derivative(i)).collect();
    let hess: Vec<Vec<Polynomial>> = grad.iter().map(|g| (0..n).map(|j| g.derivative(j)).collect()).collect();
    let eval_grad = |x: &[f64]| -> Result<DVector<f64>> {
        let v: Vec<f64> = grad.iter().map(|g| g.eval(x)).collect::<Result<_>>()?;
        Ok(DVector::from_vec(v))
    };
    let mut x = x0.to_vec();
    let mut fx = f.eval(&x)?;
    let mut g = eval_grad(&x)?;
    if !fx.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Ok(x);
    }
    for _ in 0..max_iter {
        let gn = g.norm();
        if gn == 0.0 {
            break;
        }
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = hess[i][j].eval(&x)?;
            }
        }
        let eig = sym_eigen(&h)?;
        let lmin = eig.values[n - 1];
        let shift = if lmin > 0.0 { 0.0 } else { 1e-12 - lmin + 1e-8 * gn };
        let step = match (h + DMatrix::identity(n, n) * shift).cholesky() {
            Some(c) => -c.solve(&g),
            None => -g.clone(),
        };
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let xt: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + t * b).collect();
            let ft = f.eval(&xt)?;
            let gt = eval_grad(&xt)?;
            let noise = 1e-12 * (1.0 + fx.abs());
            if ft.is_finite() && ft <= fx + noise && gt.norm() < gn {
                x = xt;
                fx = ft;
                g = gt;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Ok(x)
}

/// Maps a sphere point `(x̂, t̂)` of `f(x)·t` to `x̂/t̂` normalized.
fn lower_odd(p: &[f64]) -> Vec<f64> {
    let (x, t) = p.split_at(p.len() - 1);
    let t = if t[0].abs() > 1e-12 { t[0] } else { 1.0 };
    let v: Vec<f64> = x.iter().map(|a| a / t).collect();
    let s = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if s > 0.0 {
        v.iter().map(|a| a / s).collect()
    } else {
        v
    }
}

fn describe(o: &FlatOutcome) -> String {
    match o {
        FlatOutcome::Flat(a) => format!("flat with {} atoms", a.len()),
        FlatOutcome::NotFlat { rank, rank_lower } => {
            format!("flat extension fails: rank {rank} at order d, {rank_lower} at order d-1")
        }
        FlatOutcome::Failed(msg) => msg.clone(),
    }
}
