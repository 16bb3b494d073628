//! Problem definitions shared by the solvers.

use crate::scalar::Scalar;
use crate::sparsity::SparsityPattern;

/// A scalar equation `f(x) = 0`.
pub trait UnivariateFn {
    fn eval<S: Scalar>(&self, x: S) -> S;
}

/// A square system `f(x) = 0` with `f: Rⁿ → Rⁿ`.
///
/// `residual` must write exactly `dim()` outputs and be deterministic; it is
/// evaluated in plain, Taylor and tracing modes.
pub trait NonlinearProblem {
    fn dim(&self) -> usize;

    fn initial_guess(&self) -> Vec<f64>;

    fn residual<S: Scalar>(&self, x: &[S], out: &mut [S]);

    /// A precomputed Jacobian pattern, when the problem knows it.
    fn known_pattern(&self) -> Option<SparsityPattern> {
        None
    }
}

impl<P: NonlinearProblem + ?Sized> NonlinearProblem for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn initial_guess(&self) -> Vec<f64> {
        (**self).initial_guess()
    }
    fn residual<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        (**self).residual(x, out)
    }
    fn known_pattern(&self) -> Option<SparsityPattern> {
        (**self).known_pattern()
    }
}

/// Evaluates the residual in mode `S`, allocating the output.
pub fn eval_residual<P, S>(problem: &P, x: &[S]) -> Vec<S>
where
    P: NonlinearProblem + ?Sized,
    S: Scalar,
{
    let mut out = vec![S::from_f64(0.0); problem.dim()];
    problem.residual(x, &mut out);
    out
}

/// An autonomous-or-not ODE `y' = rhs(t, y)` on `[t0, t_end]`.
pub trait OdeProblem {
    fn dim(&self) -> usize;
    fn t0(&self) -> f64;
    fn t_end(&self) -> f64;
    fn y0(&self) -> Vec<f64>;
    fn rhs<S: Scalar>(&self, t: f64, y: &[S], out: &mut [S]);
}
