//! Nonlinear equation solvers driven by Taylor-mode automatic differentiation.
//!
//! Residuals are written once, generically over [`Scalar`], and evaluated as
//! plain `f64`, as truncated Taylor series ([`Jet`]) or as dependency tracers
//! ([`sparsity::Tracer`]). On top of that sit scalar Householder iterations,
//! multivariate Newton and Halley with LU reuse, sparsity detection with
//! column coloring, and implicit stiff ODE steppers.
//!
//! ```
//! use taylorsolve::{householder_solve, ScalarSolveConfig, Scalar, UnivariateFn};
//!
//! struct Sqrt2;
//! impl UnivariateFn for Sqrt2 {
//!     fn eval<S: Scalar>(&self, x: S) -> S {
//!         x.clone() * x - 2.0
//!     }
//! }
//!
//! let report = householder_solve(&Sqrt2, 1.0, &ScalarSolveConfig::with_order(2)).unwrap();
//! assert!((report.root - 2f64.sqrt()).abs() < 1e-12);
//! ```

pub mod error;
pub mod halley;
pub mod householder;
pub mod linalg;
pub mod ode;
pub mod problem;
pub mod problems;
pub mod report;
pub mod scalar;
pub mod sparsity;
pub mod taylor;

pub use error::SolveError;
pub use halley::{solve, solve_with_plan, JacobianStrategy, Method, MvSolveConfig};
pub use householder::{empirical_order, householder_solve, householder_step, ScalarSolveConfig};
pub use linalg::{lu_factor, lu_solve, LinalgError, LuFactors, Matrix};
pub use problem::{eval_residual, NonlinearProblem, OdeProblem, UnivariateFn};
pub use report::{Counters, SolveReport, Status};
pub use scalar::Scalar;
pub use sparsity::{color_columns, detect_pattern, Coloring, JacobianPlan, SparsityPattern};
pub use taylor::{Elementary, Jet, JetVec, TaylorError, MAX_ORDER};
