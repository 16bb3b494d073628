use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taylorsolve::linalg::{dense_jacobian, CsMatrix, DenseMatrix};
use taylorsolve::problems::{brusselator_steady, BrusselatorConfig};
use taylorsolve::{eval_residual, lu_factor, lu_solve, JacobianPlan, Matrix, NonlinearProblem};

fn homogeneous(k: usize) -> Vec<f64> {
    let mut x = vec![1.0; 2 * k * k];
    x[k * k..].fill(3.4);
    x
}

#[test]
fn brusselator_jacobian_matches_central_differences() {
    let k = 4;
    let p = brusselator_steady(BrusselatorConfig::new(k));
    let mut x = homogeneous(k);
    // Move off the exact root so every term is exercised.
    for (i, xi) in x.iter_mut().enumerate() {
        *xi += 0.01 * (i as f64).sin();
    }
    let jac = dense_jacobian(&p, &x);
    let n = p.dim();
    let scale = jac.max_abs();
    for j in 0..n {
        let h = 1e-5;
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let fp: Vec<f64> = eval_residual(&p, &xp);
        let fm: Vec<f64> = eval_residual(&p, &xm);
        for i in 0..n {
            let fd = (fp[i] - fm[i]) / (2.0 * h);
            assert!(
                (fd - jac[(i, j)]).abs() <= 1e-6 * scale,
                "({i},{j}): {fd} vs {}",
                jac[(i, j)]
            );
        }
    }
}

#[test]
fn sparse_and_dense_paths_agree_on_brusselator() {
    let p = brusselator_steady(BrusselatorConfig::new(4));
    let x = p.initial_guess();
    let plan = JacobianPlan::for_problem(&p);
    let sparse = Matrix::Sparse(plan.evaluate(&p, &x));
    let dense = Matrix::Dense(dense_jacobian(&p, &x));
    let rhs: Vec<f64> = (0..p.dim()).map(|i| 1.0 + (i % 7) as f64).collect();
    let a = lu_solve(&lu_factor(&sparse).unwrap(), &rhs);
    let b = lu_solve(&lu_factor(&dense).unwrap(), &rhs);
    let norm = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (u, v) in a.iter().zip(&b) {
        assert!((u - v).abs() <= 1e-8 * norm, "{u} vs {v}");
    }
}

fn random_dominant(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = rng.gen_range(-1.0..1.0);
        }
        data[i * n + i] += n as f64;
    }
    DenseMatrix::from_row_major(n, n, data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solve_order_does_not_matter(seed in any::<u64>(), n in 2usize..30, sparse in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_dominant(n, &mut rng);
        let m = if sparse { Matrix::Sparse(CsMatrix::from_dense(&a, 0.0)) } else { Matrix::Dense(a) };
        let f = lu_factor(&m).unwrap();
        let r1: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (a1, a2) = (lu_solve(&f, &r1), lu_solve(&f, &r2));
        let (b2, b1) = (lu_solve(&f, &r2), lu_solve(&f, &r1));
        prop_assert_eq!(&a1, &b1);
        prop_assert_eq!(&a2, &b2);
        let back = m.matvec(&a1);
        for (u, v) in back.iter().zip(&r1) {
            prop_assert!((u - v).abs() <= 1e-10 * n as f64);
        }
    }

    #[test]
    fn sparse_and_dense_factorizations_agree(seed in any::<u64>(), n in 2usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Random sparse structure plus a nonzero diagonal.
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j || rng.gen_bool(0.15) {
                    data[i * n + j] = rng.gen_range(-1.0..1.0) + if i == j { 3.0 } else { 0.0 };
                }
            }
        }
        let a = DenseMatrix::from_row_major(n, n, data).unwrap();
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let xd = lu_solve(&lu_factor(&Matrix::Dense(a.clone())).unwrap(), &rhs);
        let xs = lu_solve(&lu_factor(&Matrix::Sparse(CsMatrix::from_dense(&a, 0.0))).unwrap(), &rhs);
        let norm = xd.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (u, v) in xd.iter().zip(&xs) {
            prop_assert!((u - v).abs() <= 1e-9 * norm);
        }
    }
}
