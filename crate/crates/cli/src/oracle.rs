//! Sampling oracle: an upper estimate of the true minimum, independent of
//! any relaxation.
//!
//! Samples are drawn in fixed-size chunks, chunk `k` from its own stream
//! seeded with `seed + k`, and merged in chunk order, so the result depends
//! on the seed but not on the number of threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use regsos::poly::Polynomial;
use serde::Serialize;

use crate::error::{CliError, CliResult};

const CHUNK: usize = 4096;

/// Where the minimum is sought.
#[derive(Clone, Debug)]
pub enum Domain {
    /// All of R^n, Gaussian draws with this standard deviation.
    Free { scale: f64 },
    /// The unit sphere, normalized Gaussian draws.
    Sphere,
    /// `{x : g_i(x) ≥ 0}`, uniform draws in `[-radius, radius]^n` kept if feasible.
    Semialgebraic { g: Vec<Polynomial>, radius: f64 },
}

#[derive(Clone, Debug)]
pub struct OracleSpec {
    pub domain: Domain,
    pub samples: usize,
    pub starts: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub min: f64,
    pub point: Vec<f64>,
    pub samples: usize,
    pub feasible_samples: usize,
}

impl OracleReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

struct Chunk {
    feasible: usize,
    /// Best values of the chunk, ascending.
    best: Vec<(f64, Vec<f64>)>,
}

fn eval(f: &Polynomial, x: &[f64]) -> f64 {
    f.eval(x).unwrap_or(f64::INFINITY)
}

fn feasible(domain: &Domain, x: &[f64]) -> bool {
    match domain {
        Domain::Semialgebraic { g, .. } => g.iter().all(|gi| gi.eval(x).is_ok_and(|v| v >= 0.0)),
        _ => true,
    }
}

fn draw(domain: &Domain, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match domain {
        Domain::Free { scale } => (0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect(),
        Domain::Sphere => loop {
            let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let r = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            if r > 1e-12 {
                break v.into_iter().map(|t| t / r).collect();
            }
        },
        Domain::Semialgebraic { radius, .. } => (0..n).map(|_| rng.random_range(-radius..=*radius)).collect(),
    }
}

fn keep_best(best: &mut Vec<(f64, Vec<f64>)>, v: f64, x: Vec<f64>, cap: usize) {
    if best.len() == cap && best.last().is_some_and(|b| b.0 <= v) {
        return;
    }
    let at = best.partition_point(|b| b.0 <= v);
    best.insert(at, (v, x));
    best.truncate(cap);
}

fn sample_chunk(f: &Polynomial, spec: &OracleSpec, k: usize, len: usize, keep: usize) -> Chunk {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(k as u64));
    let n = f.nvars();
    let mut out = Chunk { feasible: 0, best: Vec::with_capacity(keep + 1) };
    for _ in 0..len {
        let x = draw(&spec.domain, n, &mut rng);
        if !feasible(&spec.domain, &x) {
            continue;
        }
        out.feasible += 1;
        let v = eval(f, &x);
        if v.is_finite() {
            keep_best(&mut out.best, v, x, keep);
        }
    }
    out
}

/// Pattern search along coordinate directions; iterates stay in the domain.
pub fn polish(f: &Polynomial, domain: &Domain, x0: &[f64], max_sweeps: usize) -> (f64, Vec<f64>) {
    let project = |mut x: Vec<f64>| {
        if matches!(domain, Domain::Sphere) {
            let r = x.iter().map(|t| t * t).sum::<f64>().sqrt();
            x.iter_mut().for_each(|t| *t /= r);
        }
        x
    };
    let mut x = project(x0.to_vec());
    let mut fx = eval(f, &x);
    let mut h = 0.1 * (1.0 + x.iter().fold(0.0f64, |a, t| a.max(t.abs())));
    for _ in 0..max_sweeps {
        if h < 1e-12 {
            break;
        }
        let mut moved = false;
        for i in 0..x.len() {
            for s in [h, -h] {
                let mut y = x.clone();
                y[i] += s;
                let y = project(y);
                if !feasible(domain, &y) {
                    continue;
                }
                let fy = eval(f, &y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    (fx, x)
}

/// Sampled minimum of `f`, polished from the best `starts` samples.
pub fn sample_minimum(f: &Polynomial, spec: &OracleSpec) -> CliResult<OracleReport> {
    if spec.samples == 0 {
        return Err(CliError::Input("the sample budget must be positive".into()));
    }
    if let Domain::Semialgebraic { g, .. } = &spec.domain {
        if let Some(gi) = g.iter().find(|gi| gi.nvars() != f.nvars()) {
            return Err(CliError::Input(format!(
                "constraint has {} variables, the objective has {}",
                gi.nvars(),
                f.nvars()
            )));
        }
    }
    let keep = spec.starts.max(1);
    let chunks = spec.samples.div_ceil(CHUNK);
    let parts: Vec<Chunk> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = CHUNK.min(spec.samples - k * CHUNK);
            sample_chunk(f, spec, k, len, keep)
        })
        .collect();
    let mut feasible_samples = 0;
    let mut best = Vec::new();
    for part in parts {
        feasible_samples += part.feasible;
        for (v, x) in part.best {
            keep_best(&mut best, v, x, keep);
        }
    }
    if best.is_empty() {
        return Err(CliError::Input(format!(
            "no feasible point among {} samples; widen the sampling region",
            spec.samples
        )));
    }
    let polished: Vec<(f64, Vec<f64>)> =
        best.par_iter().take(spec.starts.max(1)).map(|(_, x)| polish(f, &spec.domain, x, 10_000)).collect();
    let (min, point) = polished
        .into_iter()
        .chain(best.into_iter().take(1))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one candidate");
    Ok(OracleReport { min, point, samples: spec.samples, feasible_samples })
}
