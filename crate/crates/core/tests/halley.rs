use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taylorsolve::halley::{halley_step, naive_halley_step, second_directional};
use taylorsolve::householder::empirical_order_vec;
use taylorsolve::linalg::dense_jacobian;
use taylorsolve::problems::*;
use taylorsolve::{
    eval_residual, householder_solve, lu_factor, solve, JacobianStrategy, Matrix, Method, MvSolveConfig,
    NonlinearProblem, Scalar, ScalarSolveConfig, SolveReport, Status, UnivariateFn,
};

struct Affine {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl NonlinearProblem for Affine {
    fn dim(&self) -> usize {
        self.b.len()
    }
    fn initial_guess(&self) -> Vec<f64> {
        vec![0.5; self.b.len()]
    }
    fn residual<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        for (i, row) in self.a.iter().enumerate() {
            let mut acc = S::from_f64(-self.b[i]);
            for (xj, &aij) in x.iter().zip(row) {
                acc = acc + xj.clone() * aij;
            }
            out[i] = acc;
        }
    }
}

fn random_affine(n: usize, seed: u64) -> Affine {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| rng.gen_range(-1.0..1.0) + if i == j { n as f64 } else { 0.0 })
                .collect()
        })
        .collect();
    let b = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Affine { a, b }
}

struct UV;

impl NonlinearProblem for UV {
    fn dim(&self) -> usize {
        2
    }
    fn initial_guess(&self) -> Vec<f64> {
        vec![1.0, 2.0]
    }
    fn residual<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        out[0] = x[0].clone() * x[0].clone() * x[1].clone();
        out[1] = x[0].clone() + x[1].clone();
    }
}

/// `f_i(x) = g_i(x_i)` with scalar pieces from the univariate suite.
struct Decoupled;

const PIECES: [usize; 3] = [1, 3, 5];

impl NonlinearProblem for Decoupled {
    fn dim(&self) -> usize {
        PIECES.len()
    }
    fn initial_guess(&self) -> Vec<f64> {
        let suite = univariate_suite();
        PIECES.iter().map(|&id| suite[id - 1].x0 + 0.2).collect()
    }
    fn residual<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        let suite = univariate_suite();
        for (k, &id) in PIECES.iter().enumerate() {
            out[k] = suite[id - 1].eval(x[k].clone());
        }
    }
}

fn one_step<P: NonlinearProblem>(p: &P, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let fx: Vec<f64> = eval_residual(p, x);
    let factors = lu_factor(&Matrix::Dense(dense_jacobian(p, x))).unwrap();
    (
        halley_step(p, x, &factors, &fx),
        naive_halley_step(p, x, &factors, &fx),
    )
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

fn check_counters(r: &SolveReport<Vec<f64>>, method: Method) {
    assert_eq!(r.counters.factorizations, r.iterations);
    let per = if method == Method::Newton { 1 } else { 2 };
    assert_eq!(r.counters.back_solves, per * r.iterations);
}

#[test]
fn second_directional_examples() {
    let d = second_directional(&UV, &[1.0, 2.0], &[1.0, 0.0]);
    assert_eq!(d, vec![4.0, 0.0]);
    let aff = random_affine(6, 1);
    let d = second_directional(&aff, &[0.3; 6], &[1.0, -2.0, 0.5, 0.0, 1.0, 3.0]);
    assert!(d.iter().all(|&v| v == 0.0));
}

#[test]
fn second_directional_matches_finite_differences_on_chandrasekhar() {
    let p = chandrasekhar(ChandrasekharConfig::new(4));
    let x = p.initial_guess();
    let a = vec![1.0; 4];
    let ad = second_directional(&p, &x, &a);
    let fd = |h: f64| -> Vec<f64> {
        let xp: Vec<f64> = x.iter().zip(&a).map(|(xi, ai)| xi + h * ai).collect();
        let xm: Vec<f64> = x.iter().zip(&a).map(|(xi, ai)| xi - h * ai).collect();
        let (fp, f0, fm): (Vec<f64>, Vec<f64>, Vec<f64>) = (
            eval_residual(&p, &xp),
            eval_residual(&p, &x),
            eval_residual(&p, &xm),
        );
        (0..4).map(|i| (fp[i] - 2.0 * f0[i] + fm[i]) / (h * h)).collect()
    };
    let (d1, d2) = (fd(1e-2), fd(5e-3));
    for i in 0..4 {
        let rich = (4.0 * d2[i] - d1[i]) / 3.0;
        assert!((rich - ad[i]).abs() <= 1e-6 * ad[i].abs(), "{rich} vs {}", ad[i]);
    }
}

#[test]
fn decoupled_step_closed_form() {
    struct Sq;
    impl NonlinearProblem for Sq {
        fn dim(&self) -> usize {
            2
        }
        fn initial_guess(&self) -> Vec<f64> {
            vec![1.0, 1.0]
        }
        fn residual<S: Scalar>(&self, x: &[S], out: &mut [S]) {
            out[0] = x[0].clone() * x[0].clone() - 2.0;
            out[1] = x[1].clone() * x[1].clone() - 3.0;
        }
    }
    let (h, _) = one_step(&Sq, &[1.0, 1.0]);
    assert!(
        (h[0] - 1.4).abs() < 1e-15 && (h[1] - 5.0 / 3.0).abs() < 1e-15,
        "{h:?}"
    );
}

#[test]
fn taylor_mode_step_equals_naive_step() {
    for n in [2, 4, 8, 16] {
        let p = chandrasekhar(ChandrasekharConfig::new(n));
        let (h, nh) = one_step(&p, &p.initial_guess());
        assert!(rel_diff(&h, &nh) <= 1e-10, "n={n}");
    }
    let p = brusselator_steady(BrusselatorConfig::new(3));
    let (h, nh) = one_step(&p, &p.initial_guess());
    assert!(rel_diff(&h, &nh) <= 1e-9);
}

#[test]
fn diagonal_system_reduces_to_scalar_halley() {
    let cfg = MvSolveConfig {
        tol: 1e-12,
        ..MvSolveConfig::new(Method::Halley, JacobianStrategy::Dense)
    };
    let r = solve(&Decoupled, &cfg).unwrap();
    assert!(r.converged());
    let suite = univariate_suite();
    let x0 = Decoupled.initial_guess();
    for (k, &id) in PIECES.iter().enumerate() {
        let scalar = householder_solve(&suite[id - 1], x0[k], &ScalarSolveConfig::with_order(2)).unwrap();
        for (it, xs) in r.iterate_history.iter().enumerate() {
            // The scalar solve may stop earlier; it then stays at its root.
            let reference = scalar.iterate_history.get(it).copied().unwrap_or(scalar.root);
            assert!((xs[k] - reference).abs() <= 1e-12, "component {k}, iterate {it}");
        }
    }
}

#[test]
fn affine_systems_converge_in_one_iteration() {
    for n in [5, 10, 50] {
        let p = random_affine(n, n as u64);
        for method in [Method::Newton, Method::Halley, Method::NaiveHalley] {
            for strategy in [JacobianStrategy::Dense, JacobianStrategy::Sparse] {
                let r = solve(&p, &MvSolveConfig::new(method, strategy)).unwrap();
                assert_eq!(r.status, Status::Converged);
                assert_eq!(r.iterations, 1, "n={n} {method:?} {strategy:?}");
                check_counters(&r, method);
            }
        }
    }
}

#[test]
fn convergence_orders_on_chandrasekhar() {
    let p = chandrasekhar(ChandrasekharConfig::new(8));
    let reference = solve(
        &p,
        &MvSolveConfig {
            tol: 1e-13,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(reference.converged());
    let root = &reference.root;
    let floor = 64.0 * f64::EPSILON * root.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let order = |method| {
        let r = solve(
            &p,
            &MvSolveConfig {
                tol: 1e-13,
                ..MvSolveConfig::new(method, JacobianStrategy::Dense)
            },
        )
        .unwrap();
        empirical_order_vec(&r.iterate_history, root, floor).unwrap()
    };
    let newton = order(Method::Newton);
    let halley = order(Method::Halley);
    assert!((1.7..=2.3).contains(&newton), "newton {newton}");
    assert!(halley >= 2.5, "halley {halley}");
}

#[test]
fn halley_never_needs_more_iterations() {
    let run = |p: &dyn Fn(Method) -> SolveReport<Vec<f64>>| (p(Method::Newton), p(Method::Halley));
    for n in [4, 16, 64] {
        let p = chandrasekhar(ChandrasekharConfig::new(n));
        let (newton, halley) = run(&|m| solve(&p, &MvSolveConfig::new(m, JacobianStrategy::Dense)).unwrap());
        assert!(newton.converged() && halley.converged());
        assert!(halley.iterations <= newton.iterations);
        check_counters(&newton, Method::Newton);
        check_counters(&halley, Method::Halley);
    }
    let p = brusselator_steady(BrusselatorConfig::new(8));
    for strategy in [JacobianStrategy::Dense, JacobianStrategy::Sparse] {
        let (newton, halley) = run(&|m| solve(&p, &MvSolveConfig::new(m, strategy)).unwrap());
        assert!(newton.converged() && halley.converged());
        assert!(halley.iterations <= newton.iterations);
        check_counters(&halley, Method::Halley);
    }
}

#[test]
fn perturbed_homogeneous_state_is_recovered() {
    let k = 6;
    let kk = k * k;
    struct Perturbed(BrusselatorSteady, Vec<f64>);
    impl NonlinearProblem for Perturbed {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn initial_guess(&self) -> Vec<f64> {
            self.1.clone()
        }
        fn residual<S: Scalar>(&self, x: &[S], out: &mut [S]) {
            self.0.residual(x, out)
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x0: Vec<f64> = (0..2 * kk)
        .map(|i| if i < kk { 1.0 } else { 3.4 } * (1.0 + rng.gen_range(-0.01..0.01)))
        .collect();
    let p = Perturbed(brusselator_steady(BrusselatorConfig::new(k).without_source()), x0);
    for method in [Method::Newton, Method::Halley] {
        let r = solve(&p, &MvSolveConfig::new(method, JacobianStrategy::Sparse)).unwrap();
        assert!(r.converged());
        for (i, v) in r.root.iter().enumerate() {
            let target = if i < kk { 1.0 } else { 3.4 };
            assert!((v - target).abs() < 1e-6, "{method:?} {i}: {v}");
        }
    }
}

#[test]
fn singular_jacobian_is_degenerate() {
    struct Flat;
    impl NonlinearProblem for Flat {
        fn dim(&self) -> usize {
            2
        }
        fn initial_guess(&self) -> Vec<f64> {
            vec![1.0, 1.0]
        }
        fn residual<S: Scalar>(&self, x: &[S], out: &mut [S]) {
            out[0] = x[0].clone() + x[1].clone() - 1.0;
            out[1] = (x[0].clone() + x[1].clone()) * 2.0 - 1.0;
        }
    }
    let r = solve(&Flat, &MvSolveConfig::default()).unwrap();
    assert_eq!(r.status, Status::Degenerate);
}

#[test]
fn naive_halley_is_capped() {
    let p = chandrasekhar(ChandrasekharConfig::new(65));
    assert!(solve(
        &p,
        &MvSolveConfig::new(Method::NaiveHalley, JacobianStrategy::Dense)
    )
    .is_err());
}
