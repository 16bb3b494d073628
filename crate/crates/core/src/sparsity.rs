//! Jacobian sparsity detection, column coloring and compressed evaluation.
//!
//! [`Tracer`] is a [`Scalar`] that carries, next to its primal value, the set
//! of input indices it depends on. Running a residual on tracers seeded with
//! `{j}` yields each output's dependency set, i.e. one row of the pattern.
//! Branches see the primal value, so the pattern is exact for the branch
//! choices made at the tracing point.

use std::io::{self, Write};
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::linalg::CsMatrix;
use crate::problem::NonlinearProblem;
use crate::scalar::Scalar;
use crate::taylor::Jet;

/// Index-set tracer scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct Tracer {
    value: f64,
    deps: Vec<u32>,
}

impl Tracer {
    pub fn input(value: f64, index: usize) -> Self {
        Tracer {
            value,
            deps: vec![index as u32],
        }
    }

    pub fn deps(&self) -> impl Iterator<Item = usize> + '_ {
        self.deps.iter().map(|&d| d as usize)
    }

    fn union(mut self, other: &Tracer, value: f64) -> Tracer {
        self.value = value;
        if other.deps.is_empty() {
            return self;
        }
        if self.deps.is_empty() {
            self.deps = other.deps.clone();
            return self;
        }
        let mut merged = Vec::with_capacity(self.deps.len() + other.deps.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.deps, &other.deps);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    merged.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    merged.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&a[i..]);
        merged.extend_from_slice(&b[j..]);
        self.deps = merged;
        self
    }

    fn map(mut self, value: f64) -> Tracer {
        self.value = value;
        self
    }
}

macro_rules! tracer_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Tracer {
            type Output = Tracer;
            fn $method(self, rhs: Tracer) -> Tracer {
                let v = self.value $op rhs.value;
                self.union(&rhs, v)
            }
        }
        impl $trait<f64> for Tracer {
            type Output = Tracer;
            fn $method(self, rhs: f64) -> Tracer {
                let v = self.value $op rhs;
                self.map(v)
            }
        }
    };
}

tracer_binop!(Add, add, +);
tracer_binop!(Sub, sub, -);
tracer_binop!(Mul, mul, *);
tracer_binop!(Div, div, /);

impl Neg for Tracer {
    type Output = Tracer;
    fn neg(self) -> Tracer {
        let v = -self.value;
        self.map(v)
    }
}

impl Scalar for Tracer {
    fn from_f64(c: f64) -> Self {
        Tracer {
            value: c,
            deps: Vec::new(),
        }
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn recip(self) -> Self {
        let v = 1.0 / self.value;
        self.map(v)
    }
    fn exp(self) -> Self {
        let v = self.value.exp();
        self.map(v)
    }
    fn ln(self) -> Self {
        let v = self.value.ln();
        self.map(v)
    }
    fn sin(self) -> Self {
        let v = self.value.sin();
        self.map(v)
    }
    fn cos(self) -> Self {
        let v = self.value.cos();
        self.map(v)
    }
    fn sqrt(self) -> Self {
        let v = self.value.sqrt();
        self.map(v)
    }
    fn powi(self, n: i32) -> Self {
        let v = self.value.powi(n);
        // x⁰ is constant.
        if n == 0 {
            return Tracer::from_f64(v);
        }
        self.map(v)
    }
    fn powf(self, r: f64) -> Self {
        let v = self.value.powf(r);
        self.map(v)
    }
}

/// Row-wise structurally nonzero columns of a square Jacobian.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityPattern {
    n: usize,
    rows: Vec<Vec<usize>>,
}

impl SparsityPattern {
    /// Rows are sorted and deduplicated; indices must be `< n`.
    pub fn from_rows(n: usize, mut rows: Vec<Vec<usize>>) -> Option<Self> {
        if rows.len() != n {
            return None;
        }
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
            if r.last().is_some_and(|&c| c >= n) {
                return None;
            }
        }
        Some(SparsityPattern { n, rows })
    }

    pub fn dense(n: usize) -> Self {
        SparsityPattern {
            n,
            rows: vec![(0..n).collect(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    pub fn max_row_degree(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Row indices per column, ascending.
    pub fn columns(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.n];
        for (i, r) in self.rows.iter().enumerate() {
            for &j in r {
                cols[j].push(i);
            }
        }
        cols
    }

    /// Coordinate list, one `row col` pair per line.
    pub fn write_coo<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (i, r) in self.rows.iter().enumerate() {
            for &j in r {
                writeln!(w, "{i} {j}")?;
            }
        }
        Ok(())
    }
}

/// Traces the residual at `x` to find its Jacobian pattern.
pub fn detect_pattern_at<P: NonlinearProblem + ?Sized>(problem: &P, x: &[f64]) -> SparsityPattern {
    let n = problem.dim();
    let input: Vec<Tracer> = x.iter().enumerate().map(|(j, &v)| Tracer::input(v, j)).collect();
    let mut out = vec![Tracer::from_f64(0.0); n];
    problem.residual(&input, &mut out);
    let rows = out.into_iter().map(|t| t.deps().collect()).collect();
    SparsityPattern { n, rows }
}

/// [`detect_pattern_at`] the problem's initial guess.
pub fn detect_pattern<P: NonlinearProblem + ?Sized>(problem: &P) -> SparsityPattern {
    detect_pattern_at(problem, &problem.initial_guess())
}

/// Column → color map with structurally orthogonal color classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<usize>,
    num_colors: usize,
}

impl Coloring {
    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    /// No row holds two columns of the same color.
    pub fn is_valid_for(&self, pattern: &SparsityPattern) -> bool {
        let mut seen = vec![usize::MAX; self.num_colors];
        pattern.rows().iter().enumerate().all(|(i, r)| {
            r.iter().all(|&j| {
                let c = self.colors[j];
                let fresh = seen[c] != i;
                seen[c] = i;
                fresh
            })
        })
    }

    /// Columns grouped by color.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_colors];
        for (j, &c) in self.colors.iter().enumerate() {
            out[c].push(j);
        }
        out
    }
}

/// Greedy distance-2 coloring of the columns in natural order.
pub fn color_columns(pattern: &SparsityPattern) -> Coloring {
    let n = pattern.dim();
    let cols = pattern.columns();
    let mut colors = vec![usize::MAX; n];
    // forbidden[c] == j marks color c as taken by a neighbor of column j.
    let mut forbidden: Vec<usize> = Vec::new();
    let mut num_colors = 0;
    for j in 0..n {
        for &i in &cols[j] {
            for &k in pattern.row(i) {
                let c = colors[k];
                if k != j && c != usize::MAX {
                    forbidden[c] = j;
                }
            }
        }
        let c = (0..num_colors).find(|&c| forbidden[c] != j).unwrap_or(num_colors);
        if c == num_colors {
            num_colors += 1;
            forbidden.push(usize::MAX);
        }
        colors[j] = c;
    }
    Coloring { colors, num_colors }
}

/// Pattern, coloring and compressed-column layout, computed once and reused
/// for every Jacobian of a solve.
#[derive(Debug, Clone)]
pub struct JacobianPlan {
    pattern: SparsityPattern,
    coloring: Coloring,
    classes: Vec<Vec<usize>>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
}

impl JacobianPlan {
    pub fn new(pattern: SparsityPattern) -> Self {
        let coloring = color_columns(&pattern);
        Self::with_coloring(pattern, coloring)
    }

    pub fn with_coloring(pattern: SparsityPattern, coloring: Coloring) -> Self {
        let cols = pattern.columns();
        let mut col_ptr = Vec::with_capacity(pattern.dim() + 1);
        col_ptr.push(0);
        let mut row_idx = Vec::with_capacity(pattern.nnz());
        for c in &cols {
            row_idx.extend_from_slice(c);
            col_ptr.push(row_idx.len());
        }
        let classes = coloring.classes();
        JacobianPlan {
            pattern,
            coloring,
            classes,
            col_ptr,
            row_idx,
        }
    }

    pub fn for_problem<P: NonlinearProblem + ?Sized>(problem: &P) -> Self {
        Self::new(problem.known_pattern().unwrap_or_else(|| detect_pattern(problem)))
    }

    pub fn pattern(&self) -> &SparsityPattern {
        &self.pattern
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    /// Sparse Jacobian at `x` from one first-order sweep per color.
    pub fn evaluate<P: NonlinearProblem + ?Sized>(&self, problem: &P, x: &[f64]) -> CsMatrix {
        let n = self.pattern.dim();
        assert_eq!(x.len(), n, "point dimension");
        assert_eq!(problem.dim(), n, "problem dimension");
        let mut values = vec![0.0; self.row_idx.len()];
        let mut input: Vec<Jet> = x.iter().map(|&v| Jet::constant(v, 1)).collect();
        let mut out = vec![Jet::constant(0.0, 1); n];
        for class in &self.classes {
            for &j in class {
                input[j] = Jet::seed(x[j], 1.0, 1);
            }
            problem.residual(&input, &mut out);
            for &j in class {
                for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                    values[p] = out[self.row_idx[p]].coeff(1);
                }
                input[j] = Jet::constant(x[j], 1);
            }
        }
        CsMatrix::new(n, self.col_ptr.clone(), self.row_idx.clone(), values)
            .expect("pattern-derived structure is valid")
    }
}

/// One-off compressed Jacobian evaluation.
pub fn compressed_jacobian<P: NonlinearProblem + ?Sized>(
    problem: &P,
    x: &[f64],
    pattern: &SparsityPattern,
    coloring: &Coloring,
) -> CsMatrix {
    JacobianPlan::with_coloring(pattern.clone(), coloring.clone()).evaluate(problem, x)
}
