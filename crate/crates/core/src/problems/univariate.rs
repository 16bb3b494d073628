use std::f64::consts::{LN_2, PI};

use crate::problem::UnivariateFn;
use crate::scalar::Scalar;

/// The omega constant, `W(1)`: the root of both `x - e^{-x}` and `ln x + x`.
const OMEGA: f64 = 0.567_143_290_409_783_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnivariateCase {
    pub id: usize,
    pub label: &'static str,
    pub x0: f64,
    pub reference_root: f64,
    /// How `reference_root` is obtained.
    pub root_source: &'static str,
}

impl UnivariateFn for UnivariateCase {
    fn eval<S: Scalar>(&self, x: S) -> S {
        match self.id {
            1 => x.clone() * x - 2.0,
            2 => x.sqrt() - PI,
            3 => x.clone() - (-x).exp(),
            4 => x.clone() * x.clone() - (x * LN_2).exp(),
            5 => x.clone() + x.sin() - 1.0,
            6 => x.clone().ln() + x,
            id => panic!("no univariate case {id}"),
        }
    }
}

/// The six scalar test equations with their starting points.
pub fn univariate_suite() -> Vec<UnivariateCase> {
    vec![
        UnivariateCase {
            id: 1,
            label: "x^2 - 2",
            x0: 1.0,
            reference_root: std::f64::consts::SQRT_2,
            root_source: "sqrt(2)",
        },
        UnivariateCase {
            id: 2,
            label: "sqrt(x) - pi",
            x0: 10.0,
            reference_root: PI * PI,
            root_source: "pi^2",
        },
        UnivariateCase {
            id: 3,
            label: "x - exp(-x)",
            x0: 0.0,
            reference_root: OMEGA,
            root_source: "omega constant W(1)",
        },
        UnivariateCase {
            id: 4,
            label: "x^2 - 2^x",
            x0: 3.3,
            reference_root: 4.0,
            root_source: "x^2 = 2^x, basin of 4 (bisection on [3.5, 4.5])",
        },
        UnivariateCase {
            id: 5,
            label: "x + sin(x) - 1",
            x0: 0.5,
            reference_root: 0.510_973_429_388_569,
            root_source: "bisection on [0, 1]",
        },
        UnivariateCase {
            id: 6,
            label: "log(x) + x",
            x0: 1.0,
            reference_root: OMEGA,
            root_source: "omega constant W(1)",
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_cases_in_order() {
        let s = univariate_suite();
        assert_eq!(s.iter().map(|c| c.id).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(
            s.iter().map(|c| c.x0).collect::<Vec<_>>(),
            vec![1.0, 10.0, 0.0, 3.3, 0.5, 1.0]
        );
    }

    #[test]
    fn reference_roots_are_roots() {
        for c in univariate_suite() {
            let r = c.eval(c.reference_root);
            assert!(r.abs() <= 1e-12, "case {}: f(root) = {r:e}", c.id);
        }
    }

    #[test]
    fn closed_form_references() {
        let s = univariate_suite();
        assert!((s[0].reference_root.powi(2) - 2.0).abs() < 1e-15);
        assert!((s[1].reference_root - 9.869604401089358).abs() < 1e-15);
    }
}
