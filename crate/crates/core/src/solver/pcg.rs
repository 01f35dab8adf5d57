use super::linmap::LinearMap;

/// Outcome of a preconditioned CG run.
#[derive(Clone, Debug)]
pub struct PcgResult {
    pub x: Vec<f64>,
    pub iters: usize,
    /// Final residual `‖op(x) − rhs‖`.
    pub residual: f64,
    /// Set when a non-finite quantity or a nonpositive curvature appeared.
    pub breakdown: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `op(x) = rhs` from `x = 0` until `‖r‖ ≤ tol·‖rhs‖` or `cap` steps.
pub fn pcg(op: &dyn LinearMap, rhs: &[f64], precond: &dyn LinearMap, cap: usize, tol: f64) -> PcgResult {
    let m = rhs.len();
    let mut x = vec![0.0; m];
    let mut r = rhs.to_vec();
    let rhs_norm = dot(rhs, rhs).sqrt();
    let target = tol * rhs_norm;
    let mut res = rhs_norm;
    if res <= target || rhs_norm == 0.0 {
        return PcgResult { x, iters: 0, residual: res, breakdown: false };
    }
    let mut z = precond.apply_vec(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; m];
    let mut iters = 0;
    let mut breakdown = false;
    while iters < cap {
        op.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) || !rz.is_finite() {
            breakdown = true;
            break;
        }
        let alpha = rz / pq;
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        iters += 1;
        res = dot(&r, &r).sqrt();
        if !res.is_finite() {
            breakdown = true;
            break;
        }
        if res <= target {
            break;
        }
        precond.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..m {
            p[i] = z[i] + beta * p[i];
        }
    }
    PcgResult { x, iters, residual: res, breakdown }
}
