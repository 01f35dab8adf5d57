use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regsos::cone::BlockSymMatrix;
use regsos::error::Error;
use regsos::poly::{MonomialBasis, MultiIndex, Polynomial};
use regsos::relax::{
    build_homogeneous, build_lasserre, build_sparse_lasserre, build_unconstrained, chordal_cliques, csp_graph,
    odd_scale, odd_to_even, recover_bound, stability_polynomial, ArtifactMeta, ExtractionSchema, PrecondPayload,
    RelaxationArtifact, SparseConstraint,
};
use regsos::sdp::ConicSdpProblem;

fn mi(e: &[u32]) -> MultiIndex {
    MultiIndex::new(e.to_vec())
}

fn norm_sq(n: usize) -> Polynomial {
    (0..n).fold(Polynomial::zero(n), |acc, i| &acc + &(&Polynomial::var(n, i) * &Polynomial::var(n, i)))
}

fn random_form(rng: &mut ChaCha8Rng, n: usize, deg: u32) -> Polynomial {
    let terms = MonomialBasis::exact(n, deg)
        .entries()
        .iter()
        .map(|a| (a.clone(), rng.random_range(-1.0..1.0)))
        .collect::<Vec<_>>();
    Polynomial::from_terms(n, terms).unwrap()
}

/// `(AA*)_{αβ} = A_α • A_β` from dense matrices.
fn dense_gram(p: &ConicSdpProblem) -> DMatrix<f64> {
    let dense: Vec<BlockSymMatrix> = p.constraints().iter().map(|a| a.to_dense(p.cone())).collect();
    DMatrix::from_fn(p.m(), p.m(), |i, j| dense[i].inner(&dense[j]).unwrap())
}

fn payload_matrix(payload: &PrecondPayload) -> DMatrix<f64> {
    match payload {
        PrecondPayload::ExactDiagonal { a } => DMatrix::from_diagonal(&DVector::from_vec(a.clone())),
        PrecondPayload::DiagMinusRankOne { h, p } => {
            let p = DVector::from_vec(p.clone());
            DMatrix::from_diagonal(&DVector::from_vec(h.clone())) - &p * p.transpose()
        }
        PrecondPayload::DiagonalOfGram { d } => DMatrix::from_diagonal(&DVector::from_vec(d.clone())),
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

fn moments(basis: &[MultiIndex], x: &[f64]) -> DVector<f64> {
    DVector::from_iterator(basis.len(), basis.iter().map(|b| b.eval(x)))
}

/// `A*(y) + Z` with `y_α = −x^α` and `Z_i = g_i(x) v_i v_iᵀ`.
fn transported(p: &ConicSdpProblem, x: &[f64], blocks: &[(f64, Vec<MultiIndex>)]) -> BlockSymMatrix {
    let y: Vec<f64> = p.labels().iter().map(|a| -a.eval(x)).collect();
    let mut out = p.apply_a_adjoint(&y).unwrap();
    let z: Vec<DMatrix<f64>> = blocks
        .iter()
        .map(|(w, basis)| {
            let v = moments(basis, x);
            &v * v.transpose() * *w
        })
        .collect();
    out.axpy(1.0, &BlockSymMatrix::from_blocks(z).unwrap()).unwrap();
    out
}

#[test]
fn structural_sizes_and_speed() {
    let cases = [(10usize, 2u32, 66usize, 1000usize), (20, 2, 231, 10625)];
    for (n, d, big_n, m) in cases {
        let f = norm_sq(n).pow(d);
        let art = build_unconstrained(&f).unwrap();
        assert_eq!(art.problem.cone().block_sizes, vec![big_n]);
        assert_eq!(art.problem.m(), m);
    }
    let start = Instant::now();
    let art = build_homogeneous(&norm_sq(20).pow(2)).unwrap();
    assert_eq!((art.problem.cone().block_sizes[0], art.problem.m()), (210, 8854));
    let art = build_homogeneous(&norm_sq(20).pow(3)).unwrap();
    assert_eq!((art.problem.cone().block_sizes[0], art.problem.m()), (1540, 177099));
    assert!(start.elapsed().as_secs_f64() < 2.0, "{:?}", start.elapsed());
}

#[test]
fn univariate_square() {
    let f = Polynomial::monomial(mi(&[2]), 1.0);
    let art = build_unconstrained(&f).unwrap();
    assert_eq!(art.problem.cone().block_sizes, vec![2]);
    assert_eq!(art.problem.m(), 2);
    assert_eq!(art.problem.b(), &[0.0, 1.0]);
    assert_eq!(art.meta.bound_offset, 0.0);
}

#[test]
fn unconstrained_preconditioner_is_exact_inverse() {
    for n in 1..=3 {
        for d in 1..=3 {
            let art = build_unconstrained(&(&norm_sq(n).pow(d) + &Polynomial::constant(n, 1.0))).unwrap();
            let g = dense_gram(&art.problem);
            let off_diag = g.clone() - DMatrix::from_diagonal(&g.diagonal());
            assert_eq!(max_abs(&off_diag), 0.0);
            let inv = g.try_inverse().unwrap();
            assert!(max_abs(&(inv - payload_matrix(&art.meta.precond))) < 1e-10, "n={n} d={d}");
        }
    }
}

#[test]
fn homogeneous_preconditioner_is_exact_inverse() {
    for n in 2..=4 {
        for d in 1..=3 {
            let art = build_homogeneous(&norm_sq(n).pow(d)).unwrap();
            let inv = dense_gram(&art.problem).try_inverse().unwrap();
            assert!(max_abs(&(inv - payload_matrix(&art.meta.precond))) < 1e-10, "n={n} d={d}");
        }
    }
}

#[test]
fn unconstrained_identity_reconstruction() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (n, d) in [(1usize, 2u32), (2, 2), (3, 1), (3, 2)] {
        let art = build_unconstrained(&norm_sq(n).pow(d)).unwrap();
        let p = &art.problem;
        let basis = MonomialBasis::up_to(n, d);
        for _ in 0..50 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
            let w: Vec<f64> = p.labels().iter().map(|a| a.eval(&x)).collect();
            let mut s = p.apply_a_adjoint(&w).unwrap();
            s.axpy(1.0, p.c()).unwrap();
            let v = moments(basis.entries(), &x);
            assert!((s.block(0) - &v * v.transpose()).amax() < 1e-10);
        }
    }
}

#[test]
fn homogeneous_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 2..=4usize {
        for d in 1..=3u32 {
            let art = build_homogeneous(&norm_sq(n).pow(d)).unwrap();
            let p = &art.problem;
            let basis = MonomialBasis::exact(n, d);
            let dmat = DMatrix::from_diagonal(&DVector::from_iterator(
                basis.len(),
                basis.entries().iter().map(|b| b.multinomial() as f64),
            ));
            let dblk = BlockSymMatrix::from_blocks(vec![dmat.clone()]).unwrap();
            for a in p.constraints() {
                assert_eq!(a.dot(&dblk), 0.0);
            }
            assert_eq!(p.c().inner(&dblk).unwrap(), 1.0);
            for _ in 0..20 {
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
                let v = moments(basis.entries(), &x);
                let vv = &v * v.transpose();
                let xx: f64 = x.iter().map(|t| t * t).sum();
                assert!((vv.component_mul(&dmat).sum() - xx.powi(d as i32)).abs() < 1e-10);
                // Σ A_α x^α + C x1^{2d} = [x^d][x^d]ᵀ − ((xᵀx)^d − x1^{2d}) E00
                let w: Vec<f64> = p.labels().iter().map(|a| a.eval(&x)).collect();
                let mut s = p.apply_a_adjoint(&w).unwrap();
                s.axpy(x[0].powi(2 * d as i32), p.c()).unwrap();
                let mut want = vv.clone();
                want[(0, 0)] -= xx.powi(d as i32) - x[0].powi(2 * d as i32);
                assert!((s.block(0) - want).amax() < 1e-9);
            }
        }
    }
}

#[test]
fn homogeneous_data_vector() {
    // x1⁴ + x2⁴: b_α = f_α − r_α f_{(4,0)}
    let f = Polynomial::from_terms(2, [(mi(&[4, 0]), 1.0), (mi(&[0, 4]), 1.0)]).unwrap();
    let art = build_homogeneous(&f).unwrap();
    let labels = art.problem.labels();
    assert_eq!(labels, &[mi(&[3, 1]), mi(&[2, 2]), mi(&[1, 3]), mi(&[0, 4])]);
    assert_eq!(art.problem.b(), &[0.0, -2.0, 0.0, 0.0]);
    assert_eq!(art.meta.bound_offset, 1.0);
    assert!(matches!(art.meta.schema, ExtractionSchema::Homogeneous { n: 2, d: 2 }));
}

#[test]
fn odd_form_lift() {
    assert!((odd_scale(2) - 16.0 * 3f64.sqrt() / 9.0).abs() < 1e-12);
    assert!((odd_scale(3) - 216.0 * 5f64.sqrt() / 125.0).abs() < 1e-12);
    let f = Polynomial::monomial(mi(&[3]), 1.0);
    let (fhat, scale) = odd_to_even(&f).unwrap();
    assert_eq!(fhat.nvars(), 2);
    assert_eq!(fhat.coeff(&mi(&[3, 1])), 1.0);
    // min of f on S⁰ is −1; min of f̂ on S¹ from a fine angular grid
    let grid_min = (0..200_000)
        .map(|k| {
            let th = k as f64 * std::f64::consts::TAU / 200_000.0;
            fhat.eval(&[th.cos(), th.sin()]).unwrap()
        })
        .fold(f64::INFINITY, f64::min);
    assert!((scale * grid_min - (-1.0)).abs() < 1e-4, "{}", scale * grid_min);
    assert!(matches!(odd_to_even(&norm_sq(2)), Err(Error::EvenDegree(2))));
}

#[test]
fn odd_form_grid_oracle_bivariate_cubic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_form(&mut rng, 2, 3);
    let (fhat, scale) = odd_to_even(&f).unwrap();
    let k = 4000;
    let circle_min = (0..k)
        .map(|i| {
            let th = i as f64 * std::f64::consts::TAU / k as f64;
            f.eval(&[th.cos(), th.sin()]).unwrap()
        })
        .fold(f64::INFINITY, f64::min);
    // sample S² via a latitude/longitude grid
    let mut sphere_min = f64::INFINITY;
    for i in 0..=600 {
        let phi = std::f64::consts::PI * i as f64 / 600.0;
        for j in 0..1200 {
            let th = std::f64::consts::TAU * j as f64 / 1200.0;
            let p = [phi.sin() * th.cos(), phi.sin() * th.sin(), phi.cos()];
            sphere_min = sphere_min.min(fhat.eval(&p).unwrap());
        }
    }
    assert!((scale * sphere_min - circle_min).abs() < 1e-3 * (1.0 + circle_min.abs()));
}

#[test]
fn lasserre_block_structure() {
    let x1 = Polynomial::var(2, 0);
    let x2 = Polynomial::var(2, 1);
    let f = &x1 + &x2;
    let ball = &Polynomial::constant(2, 1.0) - &norm_sq(2);
    let art = build_lasserre(&f, std::slice::from_ref(&ball), 1).unwrap();
    assert_eq!(art.problem.cone().block_sizes, vec![3, 1]);
    assert_eq!(art.problem.m(), 5);
    assert!(matches!(art.meta.precond, PrecondPayload::DiagonalOfGram { .. }));
    assert!(matches!(art.meta.schema, ExtractionSchema::Dense { n: 2, d: 1 }));

    let n = 4;
    let f = norm_sq(n).pow(2);
    let cube: Vec<Polynomial> =
        (0..n).map(|i| &Polynomial::constant(n, 1.0) - &(&Polynomial::var(n, i) * &Polynomial::var(n, i))).collect();
    let art = build_lasserre(&f, &cube, 2).unwrap();
    assert_eq!(art.problem.cone().num_blocks(), n + 1);
    assert_eq!(art.problem.cone().block_sizes, vec![15, 5, 5, 5, 5]);
    assert_eq!(art.problem.m(), 69);
    let ball = &Polynomial::constant(n, 1.0) - &norm_sq(n);
    assert_eq!(build_lasserre(&f, &[ball], 2).unwrap().problem.cone().num_blocks(), 2);
}

#[test]
fn lasserre_feasibility_transport() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 3;
    let d = 2;
    let f = random_form(&mut rng, n, 3);
    let g1 = &Polynomial::constant(n, 1.0) - &norm_sq(n);
    let g2 = &Polynomial::var(n, 0) + &Polynomial::constant(n, 0.5);
    let g3 = random_form(&mut rng, n, 3);
    let art = build_lasserre(&f, &[g1.clone(), g2.clone(), g3.clone()], d).unwrap();
    for _ in 0..20 {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let blocks = vec![
            (1.0, MonomialBasis::up_to(n, 2).entries().to_vec()),
            (g1.eval(&x).unwrap(), MonomialBasis::up_to(n, 1).entries().to_vec()),
            (g2.eval(&x).unwrap(), MonomialBasis::up_to(n, 1).entries().to_vec()),
            (g3.eval(&x).unwrap(), MonomialBasis::up_to(n, 0).entries().to_vec()),
        ];
        let lhs = transported(&art.problem, &x, &blocks);
        assert!(lhs.lin_comb(1.0, art.problem.c(), -1.0).unwrap().norm() < 1e-10);
    }
}

#[test]
fn unconstrained_feasibility_transport() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_form(&mut rng, 3, 4);
    let art = build_unconstrained(&f).unwrap();
    for _ in 0..20 {
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let blocks = vec![(1.0, MonomialBasis::up_to(3, 2).entries().to_vec())];
        let lhs = transported(&art.problem, &x, &blocks);
        assert!(lhs.lin_comb(1.0, art.problem.c(), -1.0).unwrap().norm() < 1e-10);
    }
}

#[test]
fn lasserre_errors() {
    let f = norm_sq(2).pow(2);
    assert!(matches!(build_lasserre(&f, &[], 1), Err(Error::OrderTooSmall { .. })));
    assert!(matches!(build_lasserre(&f, &[], 0), Err(Error::OrderTooSmall { .. })));
    let g = Polynomial::constant(2, -1.0);
    assert!(matches!(build_lasserre(&f, &[g], 2), Err(Error::Invalid(_))));
    let g = Polynomial::constant(2, 2.0);
    assert_eq!(build_lasserre(&f, &[g], 2).unwrap().problem.cone().block_sizes, vec![6, 6]);
    let g = norm_sq(3);
    assert!(matches!(build_lasserre(&f, &[g], 2), Err(Error::DimensionMismatch { .. })));
    let g = norm_sq(2).pow(3);
    assert!(matches!(build_lasserre(&f, &[g], 2), Err(Error::OrderTooSmall { .. })));
}

#[test]
fn builder_errors() {
    assert!(matches!(build_unconstrained(&Polynomial::zero(2)), Err(Error::ZeroPolynomial)));
    let cubic = Polynomial::monomial(mi(&[3, 0]), 1.0);
    assert!(matches!(build_unconstrained(&cubic), Err(Error::OddDegree(3))));
    assert!(matches!(build_homogeneous(&cubic), Err(Error::OddDegree(3))));
    let mixed = &norm_sq(2) + &Polynomial::constant(2, 1.0);
    assert!(matches!(build_homogeneous(&mixed), Err(Error::NotHomogeneous)));
    assert!(matches!(build_homogeneous(&Polynomial::zero(2)), Err(Error::ZeroPolynomial)));
    assert!(build_homogeneous(&norm_sq(1)).is_err());
}

#[test]
fn sparse_with_full_clique_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 3;
    let f = &random_form(&mut rng, n, 4) + &random_form(&mut rng, n, 1);
    let dense = build_unconstrained(&f).unwrap();
    let sparse = build_sparse_lasserre(&f, &[], Some(&[vec![0, 1, 2]]), 2).unwrap();
    let (pd, ps) = (&dense.problem, &sparse.problem);
    assert_eq!(pd.cone(), ps.cone());
    assert_eq!(pd.m(), ps.m());
    assert_eq!((pd.c().clone().lin_comb(1.0, ps.c(), -1.0)).unwrap().norm(), 0.0);
    for (k, label) in ps.labels().iter().enumerate() {
        let j = pd.labels().iter().position(|a| a == label).unwrap();
        assert_eq!(pd.b()[j], ps.b()[k]);
        assert_eq!(pd.constraints()[j], ps.constraints()[k]);
    }
    match &sparse.meta.schema {
        ExtractionSchema::Sparse { rows, clique_blocks, .. } => {
            assert_eq!(clique_blocks, &[0]);
            for (i, r) in rows.iter().enumerate() {
                assert_eq!(ps.labels()[r.unwrap()], MultiIndex::unit(n, i));
            }
        }
        s => panic!("{s:?}"),
    }
}

fn chain(n: usize, width: usize, step: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut s = 0;
    while s + width <= n {
        out.push((s..s + width).collect());
        s += step;
    }
    out
}

#[test]
fn sparse_block_sizes() {
    let n = 10;
    let cliques = chain(n, 5, 5);
    let mut f = Polynomial::zero(n);
    for c in &cliques {
        let local: Polynomial = c.iter().fold(Polynomial::zero(n), |a, &i| &a + &Polynomial::var(n, i)).pow(6);
        f = &f + &local;
    }
    let art = build_sparse_lasserre(&f, &[], Some(&cliques), 3).unwrap();
    assert_eq!(art.problem.cone().block_sizes, vec![56, 56]);
    // W: nonconstant monomials of degree ≤ 6 in either clique
    assert_eq!(art.problem.m(), 2 * (462 - 1));
}

#[test]
fn sparse_constraints_and_transport() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 5;
    let cliques = vec![vec![0, 1, 2], vec![2, 3, 4]];
    let f = Polynomial::from_terms(
        n,
        [
            (mi(&[2, 0, 0, 0, 0]), 1.0),
            (mi(&[1, 1, 0, 0, 0]), -0.5),
            (mi(&[0, 0, 1, 1, 0]), 0.3),
            (mi(&[0, 0, 0, 1, 1]), 0.7),
        ],
    )
    .unwrap();
    let g1 = &Polynomial::constant(n, 1.0)
        - &(&(&Polynomial::var(n, 0) * &Polynomial::var(n, 0)) + &(&Polynomial::var(n, 1) * &Polynomial::var(n, 1)));
    let g2 = &Polynomial::constant(n, 1.0) - &(&Polynomial::var(n, 4) * &Polynomial::var(n, 4));
    let cons = vec![SparseConstraint::from_support(g1.clone()), SparseConstraint::from_support(g2.clone())];
    let art = build_sparse_lasserre(&f, &cons, Some(&cliques), 2).unwrap();
    assert_eq!(art.problem.cone().block_sizes, vec![10, 10, 3, 2]);
    let basis = |vars: &[usize], d: u32| -> Vec<MultiIndex> {
        MonomialBasis::up_to(vars.len(), d)
            .entries()
            .iter()
            .map(|b| {
                let mut e = vec![0; n];
                for (k, &v) in vars.iter().enumerate() {
                    e[v] = b.exponents()[k];
                }
                MultiIndex::new(e)
            })
            .collect()
    };
    for _ in 0..10 {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let blocks = vec![
            (1.0, basis(&[0, 1, 2], 2)),
            (1.0, basis(&[2, 3, 4], 2)),
            (g1.eval(&x).unwrap(), basis(&[0, 1], 1)),
            (g2.eval(&x).unwrap(), basis(&[4], 1)),
        ];
        let lhs = transported(&art.problem, &x, &blocks);
        assert!(lhs.lin_comb(1.0, art.problem.c(), -1.0).unwrap().norm() < 1e-10);
    }
    // the csp graph here is the path 0-1, 2-3-4
    let auto = build_sparse_lasserre(&f, &cons, None, 2).unwrap();
    assert_eq!(auto.meta.cliques, vec![vec![0, 1], vec![2, 3], vec![3, 4]]);
}

#[test]
fn sparse_errors() {
    let n = 4;
    let f = Polynomial::from_terms(n, [(mi(&[1, 0, 0, 1]), 1.0), (mi(&[2, 0, 0, 0]), 1.0)]).unwrap();
    let cliques = vec![vec![0, 1], vec![2, 3]];
    assert!(matches!(build_sparse_lasserre(&f, &[], Some(&cliques), 1), Err(Error::Uncovered(_))));
    assert!(matches!(build_sparse_lasserre(&f, &[], Some(&[vec![0, 9]]), 1), Err(Error::Invalid(_))));
    assert!(matches!(build_sparse_lasserre(&f, &[], None, 0), Err(Error::OrderTooSmall { .. })));
    let bad = SparseConstraint { g: Polynomial::var(n, 2), vars: vec![0] };
    assert!(matches!(build_sparse_lasserre(&f, &[bad], None, 1), Err(Error::Invalid(_))));
}

#[test]
fn chordal_cover_of_a_cycle() {
    // 6-cycle: any chordal extension has cliques of size 3 covering every edge
    let n = 6;
    let mut f = Polynomial::zero(n);
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        e[(i + 1) % n] = 1;
        f.add_term(MultiIndex::new(e), 1.0);
    }
    let g = csp_graph(&f, &[]);
    let cliques = chordal_cliques(&g);
    for i in 0..n {
        let (a, b) = (i, (i + 1) % n);
        assert!(cliques.iter().any(|c| c.contains(&a) && c.contains(&b)));
    }
    assert!(cliques.iter().all(|c| c.len() == 3));
    assert_eq!(cliques.len(), n - 2);
    for (i, c) in cliques.iter().enumerate() {
        for (j, o) in cliques.iter().enumerate() {
            assert!(i == j || !c.iter().all(|v| o.contains(v)));
        }
    }
}

#[test]
fn chordal_cover_of_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..30 {
        let n = rng.random_range(2..12);
        let mut f = Polynomial::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(0.3) {
                    let mut e = vec![0; n];
                    e[i] = 1;
                    e[j] = 1;
                    f.add_term(MultiIndex::new(e), 1.0);
                }
            }
            let mut e = vec![0; n];
            e[i] = 2;
            f.add_term(MultiIndex::new(e), 1.0);
        }
        let g = csp_graph(&f, &[]);
        let cliques = chordal_cliques(&g);
        for i in 0..n {
            assert!(cliques.iter().any(|c| c.contains(&i)));
            for &j in &g.adj[i] {
                assert!(cliques.iter().any(|c| c.contains(&i) && c.contains(&j)));
            }
        }
        // cliques of the extension are cliques: build succeeds and covers f
        build_sparse_lasserre(&f, &[], None, 1).unwrap();
    }
}

#[test]
fn stability_polynomials() {
    let n = 4;
    let complete: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    assert_eq!(stability_polynomial(&complete, n).unwrap(), norm_sq(n).pow(2));
    let empty = stability_polynomial(&[], n).unwrap();
    let u = vec![0.5; 4];
    assert!((empty.eval(&u).unwrap() - 0.25).abs() < 1e-15);
    assert!(matches!(stability_polynomial(&[(1, 1)], 3), Err(Error::Graph(_))));
    assert!(matches!(stability_polynomial(&[(0, 1), (1, 0)], 3), Err(Error::Graph(_))));
    assert!(matches!(stability_polynomial(&[(0, 3)], 3), Err(Error::Graph(_))));
    assert!(stability_polynomial(&[(0, 1)], 2).unwrap().is_homogeneous());
}

#[test]
fn bound_recovery() {
    let meta = |offset: f64, scale: Option<f64>| ArtifactMeta {
        family: regsos::relax::Family::Unconstrained,
        bound_offset: offset,
        odd_scale: scale,
        precond: PrecondPayload::ExactDiagonal { a: vec![] },
        schema: ExtractionSchema::Dense { n: 1, d: 1 },
        cliques: vec![],
    };
    assert_eq!(recover_bound(&meta(0.0, None), 0.0), 0.0);
    assert_eq!(recover_bound(&meta(1.0, None), 1.0), 0.0);
    assert_eq!(recover_bound(&meta(1.0, Some(2.0)), 3.0), -4.0);
}

#[test]
fn artifact_files_round_trip() {
    let f = Polynomial::from_terms(2, [(mi(&[4, 0]), 1.0), (mi(&[0, 4]), 1.0), (mi(&[2, 2]), 0.3)]).unwrap();
    let art = build_homogeneous(&f).unwrap();
    let dir = std::env::temp_dir().join(format!("regsos-relax-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (pp, mp) = (dir.join("p.json"), dir.join("p.meta.json"));
    art.write(&pp, &mp).unwrap();
    let back = RelaxationArtifact::read(&pp, &mp).unwrap();
    assert_eq!(back.meta, art.meta);
    assert_eq!(back.problem.b(), art.problem.b());
    assert_eq!(back.problem.constraints(), art.problem.constraints());
    std::fs::remove_dir_all(&dir).unwrap();
}
