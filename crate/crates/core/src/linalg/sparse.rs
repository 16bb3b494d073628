//! Compressed-column matrices and a left-looking sparse LU.
//!
//! The factorization follows Gilbert–Peierls: column `k` of `L` and `U` comes
//! from a sparse triangular solve against the columns of `L` computed so far,
//! whose nonzero pattern is found by a depth-first reach over the graph of
//! `L`. Rows are chosen by partial pivoting; columns are pre-ordered (by
//! default with reverse Cuthill–McKee) to keep fill bounded.

use super::ordering::reverse_cuthill_mckee;
use super::{DenseMatrix, LinalgError, PIVOT_RELATIVE_FLOOR};

const NONE: usize = usize::MAX;

/// Square compressed-sparse-column matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsMatrix {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsMatrix {
    /// Validates the compressed structure.
    pub fn new(
        n: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, LinalgError> {
        let bad = |why: &str| Err(LinalgError::InvalidStructure(why.to_string()));
        if col_ptr.len() != n + 1 || col_ptr[0] != 0 {
            return bad("column pointer length or origin");
        }
        if col_ptr.windows(2).any(|w| w[0] > w[1]) {
            return bad("column pointers decrease");
        }
        if col_ptr[n] != row_idx.len() || row_idx.len() != values.len() {
            return bad("entry count mismatch");
        }
        for j in 0..n {
            let rows = &row_idx[col_ptr[j]..col_ptr[j + 1]];
            if rows.windows(2).any(|w| w[0] >= w[1]) || rows.iter().any(|&i| i >= n) {
                return bad("row indices must be strictly increasing and in range");
            }
        }
        Ok(CsMatrix {
            n,
            col_ptr,
            row_idx,
            values,
        })
    }

    /// Keeps the entries of `a` whose magnitude exceeds `drop_below`.
    pub fn from_dense(a: &DenseMatrix, drop_below: f64) -> Self {
        assert_eq!(a.rows(), a.cols());
        let n = a.rows();
        let mut col_ptr = vec![0];
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let v = a[(i, j)];
                if v.abs() > drop_below {
                    row_idx.push(i);
                    values.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        CsMatrix {
            n,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let rows = &self.row_idx[self.col_ptr[j]..self.col_ptr[j + 1]];
        match rows.binary_search(&i) {
            Ok(p) => self.values[self.col_ptr[j] + p],
            Err(_) => 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                y[self.row_idx[p]] += self.values[p] * x[j];
            }
        }
        y
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for j in 0..self.n {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                m[(self.row_idx[p], j)] = self.values[p];
            }
        }
        m
    }
}

/// Column pre-ordering applied before the numeric factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColumnOrdering {
    Natural,
    #[default]
    ReverseCuthillMcKee,
}

/// `P · A(:, q) = L · U`.
///
/// `L` is unit lower triangular with its diagonal stored first in each column;
/// `U` stores its diagonal last. Row indices of both are in pivot order.
#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    q: Vec<usize>,
    pinv: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    up: Vec<usize>,
    ui: Vec<usize>,
    ux: Vec<f64>,
}

/// Scratch space for the depth-first reach.
struct Reach {
    marked: Vec<bool>,
    stack: Vec<usize>,
    cursor: Vec<usize>,
    /// Postorder; reversed it is a topological order of the reach.
    post: Vec<usize>,
}

impl Reach {
    fn new(n: usize) -> Self {
        Reach {
            marked: vec![false; n],
            stack: Vec::with_capacity(n),
            cursor: vec![0; n],
            post: Vec::with_capacity(n),
        }
    }

    /// Rows reachable from the nonzeros of `B(:, col)` through the columns
    /// of `L` already computed.
    fn compute(&mut self, a: &CsMatrix, col: usize, lp: &[usize], li: &[usize], pinv: &[usize]) {
        self.post.clear();
        for p in a.col_ptr[col]..a.col_ptr[col + 1] {
            let root = a.row_idx[p];
            if self.marked[root] {
                continue;
            }
            self.stack.push(root);
            self.marked[root] = true;
            self.cursor[root] = match pinv[root] {
                NONE => 0,
                jc => lp[jc] + 1,
            };
            while let Some(&j) = self.stack.last() {
                let jc = pinv[j];
                let end = if jc == NONE { 0 } else { lp[jc + 1] };
                let mut descended = false;
                while self.cursor[j] < end {
                    let i = li[self.cursor[j]];
                    self.cursor[j] += 1;
                    if !self.marked[i] {
                        self.marked[i] = true;
                        self.cursor[i] = match pinv[i] {
                            NONE => 0,
                            ic => lp[ic] + 1,
                        };
                        self.stack.push(i);
                        descended = true;
                        break;
                    }
                }
                if !descended {
                    self.stack.pop();
                    self.post.push(j);
                }
            }
        }
        for &j in &self.post {
            self.marked[j] = false;
        }
    }
}

impl SparseLu {
    pub fn factor(a: &CsMatrix, ordering: ColumnOrdering) -> Result<Self, LinalgError> {
        if a.values.iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let n = a.n;
        let q = match ordering {
            ColumnOrdering::Natural => (0..n).collect(),
            ColumnOrdering::ReverseCuthillMcKee => reverse_cuthill_mckee(a),
        };
        let floor = PIVOT_RELATIVE_FLOOR * a.max_abs();

        let mut lp = vec![0; n + 1];
        let mut up = vec![0; n + 1];
        let cap = 4 * a.nnz() + n;
        let mut li = Vec::with_capacity(cap);
        let mut lx = Vec::with_capacity(cap);
        let mut ui = Vec::with_capacity(cap);
        let mut ux = Vec::with_capacity(cap);
        let mut pinv = vec![NONE; n];
        let mut x = vec![0.0; n];
        let mut reach = Reach::new(n);

        for k in 0..n {
            lp[k] = li.len();
            up[k] = ui.len();
            let col = q[k];

            // x = L \ B(:, k) restricted to the reach.
            reach.compute(a, col, &lp, &li, &pinv);
            for p in a.col_ptr[col]..a.col_ptr[col + 1] {
                x[a.row_idx[p]] = a.values[p];
            }
            for &j in reach.post.iter().rev() {
                let jc = pinv[j];
                if jc == NONE {
                    continue;
                }
                let xj = x[j];
                for p in lp[jc] + 1..lp[jc + 1] {
                    x[li[p]] -= lx[p] * xj;
                }
            }

            let mut ipiv = NONE;
            let mut amax = -1.0;
            for &i in reach.post.iter().rev() {
                if pinv[i] == NONE {
                    let t = x[i].abs();
                    if t > amax {
                        amax = t;
                        ipiv = i;
                    }
                } else {
                    ui.push(pinv[i]);
                    ux.push(x[i]);
                }
            }
            if ipiv == NONE || amax <= floor {
                return Err(LinalgError::Singular { column: k });
            }
            // Keep the diagonal when it ties the largest candidate.
            if pinv[col] == NONE && x[col].abs() >= amax {
                ipiv = col;
            }
            let pivot = x[ipiv];
            ui.push(k);
            ux.push(pivot);
            pinv[ipiv] = k;
            li.push(ipiv);
            lx.push(1.0);
            for &i in reach.post.iter().rev() {
                if pinv[i] == NONE {
                    li.push(i);
                    lx.push(x[i] / pivot);
                }
                x[i] = 0.0;
            }
        }
        lp[n] = li.len();
        up[n] = ui.len();
        for r in li.iter_mut() {
            *r = pinv[*r];
        }
        Ok(SparseLu {
            n,
            q,
            pinv,
            lp,
            li,
            lx,
            up,
            ui,
            ux,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of `L` plus `U`.
    pub fn factor_nnz(&self) -> usize {
        self.li.len() + self.ui.len()
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(rhs.len(), n, "rhs length");
        let mut c = vec![0.0; n];
        for (i, &b) in rhs.iter().enumerate() {
            c[self.pinv[i]] = b;
        }
        for j in 0..n {
            let cj = c[j];
            if cj != 0.0 {
                for p in self.lp[j] + 1..self.lp[j + 1] {
                    c[self.li[p]] -= self.lx[p] * cj;
                }
            }
        }
        for j in (0..n).rev() {
            let diag = self.up[j + 1] - 1;
            c[j] /= self.ux[diag];
            let cj = c[j];
            if cj != 0.0 {
                for p in self.up[j]..diag {
                    c[self.ui[p]] -= self.ux[p] * cj;
                }
            }
        }
        let mut out = vec![0.0; n];
        for (k, &col) in self.q.iter().enumerate() {
            out[col] = c[k];
        }
        out
    }
}
