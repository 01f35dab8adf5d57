use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regsos::cone::{BlockSymMatrix, ConeSpec};
use regsos::sdp::{ConicSdpProblem, ConstraintMatrix, Entry};
use regsos::solver::{
    phi_value_and_grad, solve_bpm, solve_newton_cg, CholeskyInverse, DiagonalMap, SolverConfig, Status,
};

fn trace_problem() -> ConicSdpProblem {
    let cone = ConeSpec::new(vec![2]).unwrap();
    let c = BlockSymMatrix::from_blocks(vec![DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0]))]).unwrap();
    let tr = ConstraintMatrix::new(vec![Entry::new(0, 0, 0, 1.0), Entry::new(0, 1, 1, 1.0)]).unwrap();
    ConicSdpProblem::new(cone, c, vec![tr], vec![1.0], vec![]).unwrap()
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    a.qr().q()
}

/// An SDP built around a chosen complementary triple `(X*, y*, Z*)`.
fn constructed(rng: &mut ChaCha8Rng, sizes: &[usize], m: usize) -> (ConicSdpProblem, f64) {
    let cone = ConeSpec::new(sizes.to_vec()).unwrap();
    let mut xs = Vec::new();
    let mut zs = Vec::new();
    for &n in sizes {
        let q = random_orthogonal(rng, n);
        let r = rng.random_range(1..n);
        let dx = DVector::from_fn(n, |i, _| if i < r { rng.random_range(0.5..2.0) } else { 0.0 });
        let dz = DVector::from_fn(n, |i, _| if i >= r { rng.random_range(0.5..2.0) } else { 0.0 });
        xs.push(&q * DMatrix::from_diagonal(&dx) * q.transpose());
        zs.push(&q * DMatrix::from_diagonal(&dz) * q.transpose());
    }
    let xstar = BlockSymMatrix::from_blocks(xs).unwrap();
    let zstar = BlockSymMatrix::from_blocks(zs).unwrap();
    let cons: Vec<ConstraintMatrix> = (0..m)
        .map(|_| {
            let mut e = Vec::new();
            for (k, &n) in sizes.iter().enumerate() {
                for r in 0..n {
                    for c in r..n {
                        e.push(Entry::new(k, r, c, rng.random_range(-1.0..1.0)));
                    }
                }
            }
            ConstraintMatrix::new(e).unwrap()
        })
        .collect();
    let ystar: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    let scratch =
        ConicSdpProblem::new(cone.clone(), BlockSymMatrix::zeros(&cone), cons.clone(), vec![0.0; m], vec![]).unwrap();
    let mut c = scratch.apply_a_adjoint(&ystar).unwrap();
    c.axpy(1.0, &zstar).unwrap();
    let b = scratch.apply_a(&xstar).unwrap();
    let opt: f64 = b.iter().zip(&ystar).map(|(a, b)| a * b).sum();
    (ConicSdpProblem::new(cone, c, cons, b, vec![]).unwrap(), opt)
}

#[test]
fn newton_cg_trace_problem() {
    let p = trace_problem();
    let start = std::time::Instant::now();
    let s = solve_newton_cg(&p, &SolverConfig::default(), &DiagonalMap::inverse_of(&p.gram_diag())).unwrap();
    assert_eq!(s.status, Status::Converged);
    assert!((s.objective_primal - 1.0).abs() < 1e-6);
    assert!((s.x.block(0)[(0, 0)] - 1.0).abs() < 1e-5);
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn bpm_trace_problem() {
    let p = trace_problem();
    let s = solve_bpm(&p, &SolverConfig::default(), &DiagonalMap::inverse_of(&p.gram_diag())).unwrap();
    assert_eq!(s.status, Status::Converged);
    assert!((s.objective_primal - 1.0).abs() < 1e-5);
    let e1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    assert!((s.x.block(0) - e1).norm() < 1e-5);
}

#[test]
fn bpm_zero_is_optimal() {
    // b = 0 and C ⪰ 0: X = 0 is optimal with value 0
    let cone = ConeSpec::new(vec![2]).unwrap();
    let tr = ConstraintMatrix::new(vec![Entry::new(0, 0, 1, 1.0)]).unwrap();
    let p = ConicSdpProblem::new(cone.clone(), BlockSymMatrix::identity(&cone), vec![tr], vec![0.0], vec![]).unwrap();
    let s = solve_bpm(&p, &SolverConfig::default(), &DiagonalMap::inverse_of(&p.gram_diag())).unwrap();
    assert_eq!(s.status, Status::Converged);
    assert!(s.objective_primal.abs() < 1e-6);
}

#[test]
fn constructed_optimum_is_recovered_by_both_methods() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..5 {
        let (p, opt) = constructed(&mut rng, &[3, 4], 6);
        let inv = CholeskyInverse::of_gram(&p).unwrap();
        let cfg = SolverConfig::default();
        let s = solve_newton_cg(&p, &cfg, &inv).unwrap();
        assert_eq!(s.status, Status::Converged);
        assert!((s.objective_dual - opt).abs() <= 1e-5 * (1.0 + opt.abs()), "{} vs {opt}", s.objective_dual);
        let bound = 10.0 * cfg.eps_out * (1.0 + p.b().iter().map(|v| v * v).sum::<f64>().sqrt() + p.c().norm());
        assert!(s.kkt.primal <= bound && s.kkt.dual <= bound && s.kkt.gap <= bound && s.kkt.compl <= bound);

        let s = solve_bpm(&p, &cfg, &inv).unwrap();
        assert!((s.objective_dual - opt).abs() <= 1e-4 * (1.0 + opt.abs()), "bpm {} vs {opt}", s.objective_dual);
    }
}

#[test]
fn inner_iterates_increase_phi() {
    // replay the first inner loop and check monotonicity of φ along accepted steps
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (p, _) = constructed(&mut rng, &[3, 3], 5);
    let cfg = SolverConfig { max_outer: 1, ..SolverConfig::default() };
    let inv = CholeskyInverse::of_gram(&p).unwrap();
    let mut last = f64::NEG_INFINITY;
    let ymat = BlockSymMatrix::zeros(p.cone());
    for inner in 1..=6 {
        let c = SolverConfig { max_inner: inner, ..cfg.clone() };
        let s = solve_newton_cg(&p, &c, &inv).unwrap();
        let v = phi_value_and_grad(&p, &ymat, &s.y, cfg.sigma0).unwrap().value;
        assert!(v >= last - 1e-10 * (1.0 + v.abs()));
        last = v;
    }
}

#[test]
fn rejects_mismatched_preconditioner() {
    let p = trace_problem();
    assert!(solve_newton_cg(&p, &SolverConfig::default(), &DiagonalMap(vec![1.0, 1.0])).is_err());
    let bad = SolverConfig { delta: 1.5, ..SolverConfig::default() };
    assert!(solve_bpm(&p, &bad, &DiagonalMap(vec![1.0])).is_err());
}
