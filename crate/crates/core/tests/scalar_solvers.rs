use proptest::prelude::*;
use taylorsolve::householder::householder_step;
use taylorsolve::problems::univariate_suite;
use taylorsolve::{empirical_order, householder_solve, Jet, Scalar, ScalarSolveConfig, Status, UnivariateFn};

/// Plain bisection, used as an oracle for roots without closed forms.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) < 0.0, "bracket does not change sign");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn suite_converges_for_orders_one_to_five() {
    for case in univariate_suite() {
        for p in 1..=5 {
            let cfg = ScalarSolveConfig::with_order(p);
            let r = householder_solve(&case, case.x0, &cfg).unwrap();
            assert_eq!(r.status, Status::Converged, "f{} p={p}", case.id);
            assert!(r.iterations <= 100);
            assert!(
                (r.root - case.reference_root).abs() <= 1e-10,
                "f{} p={p}: {} vs {}",
                case.id,
                r.root,
                case.reference_root
            );
        }
    }
}

#[test]
fn bisection_oracles_agree_with_reference_roots() {
    let suite = univariate_suite();
    let f = |id: usize| {
        let c = suite[id - 1];
        move |x: f64| c.eval(x)
    };
    assert!((bisect(f(3), 0.0, 1.0) - suite[2].reference_root).abs() < 1e-14);
    assert!((bisect(f(4), 3.5, 4.5) - 4.0).abs() < 1e-14);
    assert!((bisect(f(5), 0.0, 1.0) - suite[4].reference_root).abs() < 1e-14);
    assert!((bisect(f(6), 0.1, 1.0) - suite[5].reference_root).abs() < 1e-14);
}

#[test]
fn halley_needs_no_more_iterations_than_newton() {
    for case in univariate_suite() {
        let it = |p| {
            householder_solve(&case, case.x0, &ScalarSolveConfig::with_order(p))
                .unwrap()
                .iterations
        };
        assert!(it(2) <= it(1), "f{}: {} > {}", case.id, it(2), it(1));
    }
}

#[test]
fn empirical_orders_on_f1() {
    let f1 = univariate_suite()[0];
    let root = 2f64.sqrt();
    let order = |p| {
        let r = householder_solve(&f1, 1.0, &ScalarSolveConfig::with_order(p)).unwrap();
        empirical_order(&r.iterate_history, root).unwrap()
    };
    let q1 = order(1);
    assert!((1.8..=2.2).contains(&q1), "p=1: {q1}");
    let q2 = order(2);
    assert!((2.6..=3.4).contains(&q2), "p=2: {q2}");
    for p in 1..=3 {
        let q = order(p);
        assert!(q >= p as f64 + 0.5 && q <= p as f64 + 1.5, "p={p}: {q}");
    }
    assert!(order(4) >= 4.0);
}

#[test]
fn third_order_step_matches_symbolic_value() {
    // For g = 1/(x²-2): g''(1) = -10, g'''(1) = -36, so the order-3 update is
    // 1 + 3·g''/g''' = 1 + 30/36.
    let f1 = univariate_suite()[0];
    let x = householder_step(&f1, 1.0, 3).unwrap();
    assert!((x - 17.0 / 12.0).abs() < 1e-15, "{x}");
}

struct Smooth {
    a: f64,
    b: f64,
    c: f64,
}

impl UnivariateFn for Smooth {
    fn eval<S: Scalar>(&self, x: S) -> S {
        (x.clone() * self.a).sin() + (x.clone() * x.clone() * self.b).exp() * self.c - x
    }
}

impl Smooth {
    fn value(&self, x: f64) -> f64 {
        (self.a * x).sin() + self.c * (self.b * x * x).exp() - x
    }

    fn slope(&self, x: f64) -> f64 {
        self.a * (self.a * x).cos() + self.c * 2.0 * self.b * x * (self.b * x * x).exp() - 1.0
    }
}

proptest! {
    #[test]
    fn order_one_is_textbook_newton(
        a in -2.0..2.0f64,
        b in -0.5..0.5f64,
        c in -1.0..1.0f64,
        x in -1.5..1.5f64,
    ) {
        let f = Smooth { a, b, c };
        let d = f.slope(x);
        prop_assume!(d.abs() > 1e-3);
        let expected = x - f.value(x) / d;
        let got = householder_step(&f, x, 1).unwrap();
        prop_assert!((got - expected).abs() <= 1e-14 * expected.abs().max(1.0), "{got} vs {expected}");
        // The bundle carries the same derivative.
        let jet = f.eval(Jet::seed(x, 1.0, 1));
        prop_assert!((jet.derivative(1).unwrap() - d).abs() <= 1e-13 * d.abs().max(1.0));
    }
}

#[test]
fn zero_residual_start_returns_immediately() {
    let f1 = univariate_suite()[0];
    let r = householder_solve(&f1, 2f64.sqrt(), &ScalarSolveConfig::with_order(3)).unwrap();
    assert_eq!(r.status, Status::Converged);
    assert_eq!(r.iterations, 0);
}
