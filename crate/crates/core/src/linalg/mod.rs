//! Dense and sparse LU with reusable factorization objects.
//!
//! A [`LuFactors`] is built once per Jacobian and then serves any number of
//! right-hand sides; Halley's method uses it twice per iteration.

mod dense;
mod ordering;
mod sparse;

use thiserror::Error;

pub use dense::{DenseLu, DenseMatrix};
pub use ordering::reverse_cuthill_mckee;
pub use sparse::{ColumnOrdering, CsMatrix, SparseLu};

use crate::problem::NonlinearProblem;
use crate::taylor::Jet;

/// A pivot column is singular when its largest candidate is at most this
/// fraction of `‖A‖_max`.
pub const PIVOT_RELATIVE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular to working precision at pivot column {column}")]
    Singular { column: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("invalid compressed structure: {0}")]
    InvalidStructure(String),
}

/// A Jacobian in either storage.
#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Dense(DenseMatrix),
    Sparse(CsMatrix),
}

impl Matrix {
    pub fn dim(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.rows(),
            Matrix::Sparse(m) => m.dim(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Matrix::Dense(m) => m.matvec(x),
            Matrix::Sparse(m) => m.matvec(x),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Matrix::Dense(m) => m.max_abs(),
            Matrix::Sparse(m) => m.max_abs(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(m) => m.clone(),
            Matrix::Sparse(m) => m.to_dense(),
        }
    }
}

/// A factorization ready for repeated solves.
#[derive(Debug, Clone)]
pub enum LuFactors {
    Dense(DenseLu),
    Sparse(SparseLu),
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        match self {
            LuFactors::Dense(f) => f.dim(),
            LuFactors::Sparse(f) => f.dim(),
        }
    }

    /// Solves `A y = rhs`. The factors are not modified.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        match self {
            LuFactors::Dense(f) => f.solve(rhs),
            LuFactors::Sparse(f) => f.solve(rhs),
        }
    }
}

/// Dense path: partial-pivoted right-looking LU. Sparse path: left-looking
/// column LU over an RCM column ordering.
pub fn lu_factor(a: &Matrix) -> Result<LuFactors, LinalgError> {
    match a {
        Matrix::Dense(m) => DenseLu::factor(m).map(LuFactors::Dense),
        Matrix::Sparse(m) => SparseLu::factor(m, ColumnOrdering::ReverseCuthillMcKee).map(LuFactors::Sparse),
    }
}

pub fn lu_solve(factors: &LuFactors, rhs: &[f64]) -> Vec<f64> {
    factors.solve(rhs)
}

/// Dense Jacobian from `n` first-order Taylor sweeps, one per unit direction.
pub fn dense_jacobian<P: NonlinearProblem + ?Sized>(problem: &P, x: &[f64]) -> DenseMatrix {
    let n = problem.dim();
    assert_eq!(x.len(), n, "point dimension");
    let mut jac = DenseMatrix::zeros(n, n);
    let mut input: Vec<Jet> = x.iter().map(|&v| Jet::constant(v, 1)).collect();
    let mut out = vec![Jet::constant(0.0, 1); n];
    for j in 0..n {
        input[j] = Jet::seed(x[j], 1.0, 1);
        problem.residual(&input, &mut out);
        for (i, fi) in out.iter().enumerate() {
            jac[(i, j)] = fi.coeff(1);
        }
        input[j] = Jet::constant(x[j], 1);
    }
    jac
}
