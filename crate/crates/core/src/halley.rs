//! Multivariate Halley's method with Jacobian factorization reuse.
//!
//! Each iteration factors `Df(x)` once and performs two back-solves:
//!
//! ```text
//! Df(x) a = -f(x)
//! Df(x) b = D²f(x)[a, a]          (one second-order Taylor sweep)
//! x      += a ⊙ a ⊘ (a + b / 2)
//! ```
//!
//! Newton is the same loop without the `b` phase. `NaiveHalley` assembles the
//! full second-derivative tensor and contracts it explicitly; it is a
//! reference for the Taylor-mode contraction and is limited to small `n`.

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::linalg::{dense_jacobian, lu_factor, LuFactors, Matrix};
use crate::problem::{eval_residual, NonlinearProblem};
use crate::report::{Counters, SolveReport, Status};
use crate::sparsity::JacobianPlan;
use crate::taylor::{seed_components, Jet, JetVec};

/// Largest dimension accepted by [`Method::NaiveHalley`].
pub const NAIVE_HALLEY_MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    Newton,
    Halley,
    NaiveHalley,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Newton => "newton",
            Method::Halley => "halley",
            Method::NaiveHalley => "naive-halley",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "newton" => Ok(Method::Newton),
            "halley" => Ok(Method::Halley),
            "naive-halley" | "naivehalley" | "naive" => Ok(Method::NaiveHalley),
            _ => Err(format!("unknown method `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JacobianStrategy {
    Dense,
    Sparse,
}

impl JacobianStrategy {
    pub fn name(self) -> &'static str {
        match self {
            JacobianStrategy::Dense => "dense",
            JacobianStrategy::Sparse => "sparse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvSolveConfig {
    /// Bound on `‖f(x)‖∞`.
    pub tol: f64,
    pub max_iter: usize,
    pub jacobian_strategy: JacobianStrategy,
    pub method: Method,
}

impl Default for MvSolveConfig {
    fn default() -> Self {
        MvSolveConfig {
            tol: 1e-8,
            max_iter: 100,
            jacobian_strategy: JacobianStrategy::Dense,
            method: Method::Halley,
        }
    }
}

impl MvSolveConfig {
    pub fn new(method: Method, jacobian_strategy: JacobianStrategy) -> Self {
        MvSolveConfig {
            method,
            jacobian_strategy,
            ..Default::default()
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), SolveError> {
        if !(self.tol > 0.0) {
            return Err(SolveError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(SolveError::InvalidConfig("max_iter must be >= 1".into()));
        }
        if self.method == Method::NaiveHalley && n > NAIVE_HALLEY_MAX_DIM {
            return Err(SolveError::InvalidConfig(format!(
                "naive Halley is limited to n <= {NAIVE_HALLEY_MAX_DIM}, got {n}"
            )));
        }
        Ok(())
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// The full bundle `(f(x), Df(x)[a], D²f(x)[a,a]/2)` from one sweep.
pub fn second_order_bundle<P: NonlinearProblem + ?Sized>(problem: &P, x: &[f64], a: &[f64]) -> JetVec {
    let out: Vec<Jet> = eval_residual(problem, &seed_components(x, a, 2));
    JetVec::from_jets(&out)
}

/// `D²f(x)[a, a]` via a second-order Taylor sweep.
pub fn second_directional<P: NonlinearProblem + ?Sized>(problem: &P, x: &[f64], a: &[f64]) -> Vec<f64> {
    let out: Vec<Jet> = eval_residual(problem, &seed_components(x, a, 2));
    out.iter().map(|j| 2.0 * j.coeff(2)).collect()
}

/// `x + a²/(a + b/2)` componentwise; where the denominator vanishes relative
/// to `a` the Newton increment `a` is used instead.
pub fn halley_update(x: &[f64], a: &[f64], b: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(a)
        .zip(b)
        .map(|((&xi, &ai), &bi)| {
            let denom = ai + 0.5 * bi;
            if denom.abs() <= 1e-12 * (ai.abs() + 1e-300) {
                xi + ai
            } else {
                xi + ai * ai / denom
            }
        })
        .collect()
}

fn halley_step_counted<P: NonlinearProblem + ?Sized>(
    problem: &P,
    x: &[f64],
    factors: &LuFactors,
    fx: &[f64],
    counters: &mut Counters,
) -> Vec<f64> {
    let neg: Vec<f64> = fx.iter().map(|v| -v).collect();
    let a = factors.solve(&neg);
    counters.back_solves += 1;
    let h = second_directional(problem, x, &a);
    counters.f_evals += 1;
    let b = factors.solve(&h);
    counters.back_solves += 1;
    halley_update(x, &a, &b)
}

/// One Halley iteration given `factors` of `Df(x)` and `fx = f(x)`.
pub fn halley_step<P: NonlinearProblem + ?Sized>(
    problem: &P,
    x: &[f64],
    factors: &LuFactors,
    fx: &[f64],
) -> Vec<f64> {
    halley_step_counted(problem, x, factors, fx, &mut Counters::default())
}

/// Second-derivative tensor: `t[k][(i, j)] = ∂²f_k/∂x_i∂x_j`, from
/// directional probes and polarization.
pub fn second_derivative_tensor<P: NonlinearProblem + ?Sized>(problem: &P, x: &[f64]) -> Vec<Vec<f64>> {
    let n = problem.dim();
    let mut t = vec![vec![0.0; n * n]; n];
    let mut dir = vec![0.0; n];
    let mut diag = vec![vec![0.0; n]; n];
    for i in 0..n {
        dir[i] = 1.0;
        diag[i] = second_directional(problem, x, &dir);
        dir[i] = 0.0;
        for k in 0..n {
            t[k][i * n + i] = diag[i][k];
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            dir[i] = 1.0;
            dir[j] = 1.0;
            let mixed = second_directional(problem, x, &dir);
            dir[i] = 0.0;
            dir[j] = 0.0;
            for k in 0..n {
                let h = 0.5 * (mixed[k] - diag[i][k] - diag[j][k]);
                t[k][i * n + j] = h;
                t[k][j * n + i] = h;
            }
        }
    }
    t
}

/// Number of directional probes [`second_derivative_tensor`] performs.
pub fn tensor_probe_count(n: usize) -> usize {
    n + n * n.saturating_sub(1) / 2
}

fn naive_halley_step_counted<P: NonlinearProblem + ?Sized>(
    problem: &P,
    x: &[f64],
    factors: &LuFactors,
    fx: &[f64],
    counters: &mut Counters,
) -> Vec<f64> {
    let n = x.len();
    let neg: Vec<f64> = fx.iter().map(|v| -v).collect();
    let a = factors.solve(&neg);
    counters.back_solves += 1;
    let t = second_derivative_tensor(problem, x);
    counters.f_evals += tensor_probe_count(n);
    let h: Vec<f64> = t
        .iter()
        .map(|tk| {
            let mut s = 0.0;
            for i in 0..n {
                let row = &tk[i * n..(i + 1) * n];
                s += a[i] * row.iter().zip(&a).map(|(hij, aj)| hij * aj).sum::<f64>();
            }
            s
        })
        .collect();
    let b = factors.solve(&h);
    counters.back_solves += 1;
    halley_update(x, &a, &b)
}

/// One Halley iteration using the explicit second-derivative tensor.
pub fn naive_halley_step<P: NonlinearProblem + ?Sized>(
    problem: &P,
    x: &[f64],
    factors: &LuFactors,
    fx: &[f64],
) -> Vec<f64> {
    naive_halley_step_counted(problem, x, factors, fx, &mut Counters::default())
}

/// Solves `f(x) = 0` from the problem's initial guess.
pub fn solve<P: NonlinearProblem + ?Sized>(
    problem: &P,
    cfg: &MvSolveConfig,
) -> Result<SolveReport<Vec<f64>>, SolveError> {
    match cfg.jacobian_strategy {
        JacobianStrategy::Dense => solve_with_plan(problem, cfg, None),
        JacobianStrategy::Sparse => {
            let plan = JacobianPlan::for_problem(problem);
            solve_with_plan(problem, cfg, Some(&plan))
        }
    }
}

/// [`solve`] with a caller-supplied sparse plan. The plan is used when the
/// strategy is `Sparse`; one is built if missing.
pub fn solve_with_plan<P: NonlinearProblem + ?Sized>(
    problem: &P,
    cfg: &MvSolveConfig,
    plan: Option<&JacobianPlan>,
) -> Result<SolveReport<Vec<f64>>, SolveError> {
    let n = problem.dim();
    cfg.validate(n)?;
    let owned_plan;
    let plan = match (cfg.jacobian_strategy, plan) {
        (JacobianStrategy::Sparse, None) => {
            owned_plan = JacobianPlan::for_problem(problem);
            Some(&owned_plan)
        }
        (JacobianStrategy::Sparse, Some(p)) => Some(p),
        (JacobianStrategy::Dense, _) => None,
    };

    let mut x = problem.initial_guess();
    if x.len() != n {
        return Err(SolveError::InvalidConfig(format!(
            "initial guess has length {}, expected {n}",
            x.len()
        )));
    }
    let mut counters = Counters::default();
    let mut residual_history = Vec::new();
    let mut iterate_history = vec![x.clone()];
    let mut iterations = 0;

    let status = loop {
        let fx: Vec<f64> = eval_residual(problem, &x);
        counters.f_evals += 1;
        let norm = inf_norm(&fx);
        residual_history.push(norm);
        if !norm.is_finite() || x.iter().any(|v| !v.is_finite()) {
            break Status::Diverged;
        }
        if norm <= cfg.tol {
            break Status::Converged;
        }
        if iterations >= cfg.max_iter {
            break Status::MaxIter;
        }

        let jac = match plan {
            Some(plan) => {
                counters.f_evals += plan.coloring().num_colors();
                Matrix::Sparse(plan.evaluate(problem, &x))
            }
            None => {
                counters.f_evals += n;
                Matrix::Dense(dense_jacobian(problem, &x))
            }
        };
        counters.jacobians += 1;
        let factors = match lu_factor(&jac) {
            Ok(f) => f,
            Err(_) => break Status::Degenerate,
        };
        counters.factorizations += 1;

        x = match cfg.method {
            Method::Newton => {
                let neg: Vec<f64> = fx.iter().map(|v| -v).collect();
                let a = factors.solve(&neg);
                counters.back_solves += 1;
                x.iter().zip(&a).map(|(xi, ai)| xi + ai).collect()
            }
            Method::Halley => halley_step_counted(problem, &x, &factors, &fx, &mut counters),
            Method::NaiveHalley => naive_halley_step_counted(problem, &x, &factors, &fx, &mut counters),
        };
        iterations += 1;
        iterate_history.push(x.clone());
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
