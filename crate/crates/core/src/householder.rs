//! Householder's method of arbitrary order for scalar equations.
//!
//! Each iteration seeds `(x, 1, 0, …, 0)`, pushes it through `f`, inverts the
//! resulting series and steps to
//!
//! ```text
//! x + p · (1/f)^(p-1)(x) / (1/f)^(p)(x)  =  x + g[p-1] / g[p]
//! ```
//!
//! where `g` are the normalized coefficients of `1/f`. Order 1 is Newton,
//! order 2 is Halley; the local convergence order is `p + 1`.

use crate::error::SolveError;
use crate::problem::UnivariateFn;
use crate::report::{Counters, SolveReport, Status};
use crate::taylor::{Jet, MAX_ORDER, ZERO_PRIMAL_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSolveConfig {
    pub order: usize,
    /// Bound on `|f(x)|`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ScalarSolveConfig {
    fn default() -> Self {
        ScalarSolveConfig {
            order: 2,
            tol: 1e-12,
            max_iter: 100,
        }
    }
}

impl ScalarSolveConfig {
    pub fn with_order(order: usize) -> Self {
        ScalarSolveConfig {
            order,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if !(1..=MAX_ORDER).contains(&self.order) {
            return Err(SolveError::InvalidConfig(format!(
                "order {} outside 1..={MAX_ORDER}",
                self.order
            )));
        }
        if !(self.tol > 0.0) {
            return Err(SolveError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(SolveError::InvalidConfig("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// The update from a pushed-forward bundle `f(x + t)` of order `p`.
fn update_from_bundle(x: f64, fx: &Jet) -> Result<f64, SolveError> {
    let p = fx.order();
    let g = fx
        .try_recip()
        .map_err(|e| SolveError::Degenerate(e.to_string()))?;
    let top = g.coeff(p);
    if !(top.abs() > ZERO_PRIMAL_FLOOR) {
        return Err(SolveError::Degenerate(format!(
            "order-{p} coefficient of 1/f vanished at x = {x}"
        )));
    }
    Ok(x + g.coeff(p - 1) / top)
}

/// One Householder step of order `p` from `x`.
pub fn householder_step<F: UnivariateFn>(f: &F, x: f64, p: usize) -> Result<f64, SolveError> {
    if !(1..=MAX_ORDER).contains(&p) {
        return Err(SolveError::InvalidConfig(format!("order {p}")));
    }
    update_from_bundle(x, &f.eval(Jet::seed(x, 1.0, p)))
}

/// Iterates [`householder_step`] until `|f(x)| <= tol`.
///
/// Numerical failures are reported through [`SolveReport::status`]; only an
/// invalid configuration is an `Err`.
pub fn householder_solve<F: UnivariateFn>(
    f: &F,
    x0: f64,
    cfg: &ScalarSolveConfig,
) -> Result<SolveReport<f64>, SolveError> {
    cfg.validate()?;
    let p = cfg.order;
    let mut x = x0;
    let mut iterate_history = vec![x0];
    let mut residual_history = Vec::new();
    let mut counters = Counters::default();
    let mut iterations = 0;

    let status = loop {
        // The primal coefficient of the bundle is f(x) itself.
        let fx = f.eval(Jet::seed(x, 1.0, p));
        counters.f_evals += 1;
        let r = fx.coeff(0);
        residual_history.push(r.abs());
        if !x.is_finite() || !r.is_finite() {
            break Status::Diverged;
        }
        if r.abs() <= cfg.tol {
            break Status::Converged;
        }
        if iterations >= cfg.max_iter {
            break Status::MaxIter;
        }
        match update_from_bundle(x, &fx) {
            Ok(next) => {
                x = next;
                iterations += 1;
                iterate_history.push(x);
            }
            Err(_) => break Status::Degenerate,
        }
    };

    Ok(SolveReport {
        root: x,
        status,
        iterations,
        residual_history,
        iterate_history,
        counters,
    })
}

/// Estimates the convergence order from iterates of a scalar solve.
///
/// Errors `|x_k - root|` at or below `64·ε·max(1, |root|)` are round-off and
/// are discarded, as are leading errors `>= 1`.
pub fn empirical_order(iterates: &[f64], root: f64) -> Result<f64, SolveError> {
    let errors: Vec<f64> = iterates.iter().map(|x| (x - root).abs()).collect();
    let floor = 64.0 * f64::EPSILON * root.abs().max(1.0);
    order_from_errors(&errors, floor)
}

/// [`empirical_order`] for vector iterates, using the max-norm error.
pub fn empirical_order_vec(iterates: &[Vec<f64>], root: &[f64], floor: f64) -> Result<f64, SolveError> {
    let errors: Vec<f64> = iterates
        .iter()
        .map(|x| x.iter().zip(root).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .collect();
    order_from_errors(&errors, floor)
}

/// Order estimate from an error sequence.
///
/// With two or more usable consecutive error pairs this averages the
/// three-point estimate `log(e[k+1]/e[k]) / log(e[k]/e[k-1])` over the final
/// three pairs; with exactly one pair it falls back to `log e[k+1] / log e[k]`.
pub fn order_from_errors(errors: &[f64], floor: f64) -> Result<f64, SolveError> {
    if errors.len() < 3 {
        return Err(SolveError::InsufficientData);
    }
    let above: Vec<f64> = errors
        .iter()
        .copied()
        .take_while(|&e| e > floor && e.is_finite())
        .collect();
    // Longest trailing run that lies in (0, 1) and strictly decreases.
    let mut start = above.len();
    while start > 0 {
        let e = above[start - 1];
        let ok = e < 1.0 && (start == above.len() || e > above[start]);
        if !ok {
            break;
        }
        start -= 1;
    }
    let usable = &above[start..];
    match usable.len() {
        0 | 1 => Err(SolveError::InsufficientData),
        2 => Ok(usable[1].ln() / usable[0].ln()),
        m => {
            let tail = &usable[m.saturating_sub(4)..];
            let ratios: Vec<f64> = tail.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
            let estimates: Vec<f64> = ratios.windows(2).map(|r| r[1] / r[0]).collect();
            Ok(estimates.iter().sum::<f64>() / estimates.len() as f64)
        }
    }
}
