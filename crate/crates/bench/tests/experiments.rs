use taylorsolve::ode::Scheme;
use taylorsolve::{JacobianStrategy, Method};
use taylorsolve_bench::experiments::run;
use taylorsolve_bench::table::{BrusselatorRow, ChandrasekharRow, OdeWpRow, Rows, ScalarRow};
use taylorsolve_bench::{BenchRunConfig, Experiment};

fn config(exp: Experiment, settings: &[(&str, &str)]) -> BenchRunConfig {
    let mut cfg = BenchRunConfig::defaults(exp);
    for (k, v) in settings {
        cfg.set(k, v).unwrap();
    }
    cfg
}

fn scalar_key(r: &ScalarRow) -> (usize, usize, usize, bool, u64) {
    (
        r.function_id,
        r.order,
        r.iterations,
        r.converged,
        r.root.to_bits(),
    )
}

#[test]
fn scalar_iterations_do_not_depend_on_repetitions() {
    let one = run(&config(Experiment::Scalar, &[("reps", "1")])).unwrap();
    let many = run(&config(Experiment::Scalar, &[("reps", "1000")])).unwrap();
    let (Rows::Scalar(a), Rows::Scalar(b)) = (&one.rows, &many.rows) else {
        panic!("scalar rows expected");
    };
    assert_eq!(a.len(), 30);
    assert_eq!(
        a.iter().map(scalar_key).collect::<Vec<_>>(),
        b.iter().map(scalar_key).collect::<Vec<_>>()
    );
    assert!(one.all_passed() && many.all_passed());
    let f1 = |p| {
        a.iter()
            .find(|r| r.function_id == 1 && r.order == p)
            .unwrap()
            .iterations
    };
    assert!(f1(2) <= f1(1));
}

fn chandra_key(r: &ChandrasekharRow) -> (usize, Method, usize, usize, usize, u64) {
    (
        r.n,
        r.method,
        r.iterations,
        r.factorizations,
        r.back_solves,
        r.final_residual.to_bits(),
    )
}

#[test]
fn chandrasekhar_sweep_is_deterministic() {
    let cfg = config(
        Experiment::Chandrasekhar,
        &[("sizes", "4,8,16"), ("reps", "1"), ("tol", "1e-6,1e-10")],
    );
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    let (Rows::Chandrasekhar(ra), Rows::Chandrasekhar(rb)) = (&a.rows, &b.rows) else {
        panic!("chandrasekhar rows expected");
    };
    assert_eq!(ra.len(), 3 * 3 * 2);
    assert_eq!(
        ra.iter().map(chandra_key).collect::<Vec<_>>(),
        rb.iter().map(chandra_key).collect::<Vec<_>>()
    );
    assert!(a.all_passed(), "{:?}", a.checks);
    for n in [4, 8, 16] {
        for tol in [1e-6, 1e-10] {
            let it = |m| {
                ra.iter()
                    .find(|r| r.n == n && r.tol == tol && r.method == m)
                    .unwrap()
                    .iterations
            };
            assert_eq!(it(Method::NaiveHalley), it(Method::Halley), "n={n}");
        }
    }
}

#[test]
fn naive_halley_is_skipped_above_the_cap() {
    let cfg = config(Experiment::Chandrasekhar, &[("sizes", "128"), ("reps", "1")]);
    let t = run(&cfg).unwrap();
    let Rows::Chandrasekhar(rows) = &t.rows else {
        panic!()
    };
    assert!(rows.iter().all(|r| r.method != Method::NaiveHalley));
    assert_eq!(rows.len(), 2);
}

fn bruss_key(r: &BrusselatorRow) -> (usize, Method, JacobianStrategy, usize, usize, usize, u64) {
    (
        r.k,
        r.method,
        r.jacobian_strategy,
        r.num_colors,
        r.iterations,
        r.back_solves,
        r.final_residual.to_bits(),
    )
}

#[test]
fn brusselator_sweep_is_deterministic() {
    let cfg = config(Experiment::Brusselator, &[("sizes", "4,8"), ("reps", "1")]);
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    let (Rows::Brusselator(ra), Rows::Brusselator(rb)) = (&a.rows, &b.rows) else {
        panic!("brusselator rows expected");
    };
    assert_eq!(ra.len(), 2 * 2 * 2);
    assert_eq!(
        ra.iter().map(bruss_key).collect::<Vec<_>>(),
        rb.iter().map(bruss_key).collect::<Vec<_>>()
    );
    assert!(a.all_passed(), "{:?}", a.checks);
    for r in ra {
        assert_eq!(r.n, 2 * r.k * r.k);
        match r.jacobian_strategy {
            JacobianStrategy::Dense => assert_eq!(r.num_colors, r.n),
            JacobianStrategy::Sparse => assert!(r.num_colors <= 12),
        }
    }
}

fn wp_key(r: &OdeWpRow) -> (usize, Scheme, Method, u64, u64, usize, usize, usize, usize) {
    (
        r.k,
        r.scheme,
        r.inner,
        r.tolerance.to_bits(),
        r.error.to_bits(),
        r.total_steps,
        r.rejected_steps,
        r.total_nonlinear_iterations,
        r.total_back_solves,
    )
}

#[test]
fn short_work_precision_sweep() {
    let cfg = config(
        Experiment::OdeWp,
        &[("sizes", "4"), ("t-end", "1.5"), ("tol", "1e-2,1e-3,1e-4")],
    );
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    let (Rows::OdeWp(ra), Rows::OdeWp(rb)) = (&a.rows, &b.rows) else {
        panic!("ode-wp rows expected");
    };
    assert_eq!(ra.len(), 2 * 2 * 3);
    assert_eq!(
        ra.iter().map(wp_key).collect::<Vec<_>>(),
        rb.iter().map(wp_key).collect::<Vec<_>>()
    );
    assert!(a.all_passed(), "{:?}", a.checks);
    for r in ra {
        let per_iter = if r.inner == Method::Halley { 2 } else { 1 };
        assert_eq!(r.total_back_solves, per_iter * r.total_nonlinear_iterations);
        assert_eq!(r.total_factorizations, r.total_nonlinear_iterations);
    }
    // Rows come out grouped by cell and ordered loosest tolerance first.
    for w in ra.windows(2) {
        if (w[0].scheme, w[0].inner) == (w[1].scheme, w[1].inner) {
            assert!(w[0].tolerance > w[1].tolerance);
        }
    }
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(run(&config(Experiment::Brusselator, &[("sizes", "2")])).is_err());
    assert!(run(&config(Experiment::OdeWp, &[("methods", "naive-halley")])).is_err());
    assert!(run(&config(Experiment::Chandrasekhar, &[("reps", "0")])).is_err());
    assert!(run(&config(Experiment::Chandrasekhar, &[("c", "1.5")])).is_err());
}
