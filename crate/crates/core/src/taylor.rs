//! Truncated Taylor-series arithmetic.
//!
//! A [`Jet`] of order `p` carries `p + 1` normalized coefficients of
//! `t ↦ f(x + t v)`:
//!
//! ```text
//! c[k] = D^k f(x)[v, …, v] / k!
//! ```
//!
//! Every elementary function is pushed forward with its own coefficient
//! recurrence (Cauchy products and logarithmic-derivative recurrences), so a
//! `p`-th order evaluation costs `O(p²)` flops per operation instead of the
//! exponential blow-up of nesting first-order duals. Use [`Jet::derivative`]
//! to recover raw directional derivatives.
//!
//! Jets of different orders may be mixed; the result carries the larger
//! order. Constants built with [`Scalar::from_f64`] have order 0.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::Scalar;

/// Highest supported truncation order.
pub const MAX_ORDER: usize = 15;
const CAP: usize = MAX_ORDER + 1;

/// Below this magnitude a primal value is treated as zero by the checked
/// operations ([`Jet::try_recip`], [`Jet::try_div`]).
pub const ZERO_PRIMAL_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TaylorError {
    #[error("primal value {0:e} is too close to zero")]
    ZeroPrimal(f64),
    #[error("{op} is undefined at primal value {value}")]
    Domain { op: &'static str, value: f64 },
    #[error("coefficient index {index} exceeds order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("shape mismatch: {0} vs {1}")]
    ShapeMismatch(usize, usize),
    #[error("order {0} is outside 1..={MAX_ORDER}")]
    InvalidOrder(usize),
}

/// A univariate truncated Taylor series in normalized coefficients.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet {
    order: usize,
    c: [f64; CAP],
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Jet").field(&self.coeffs()).finish()
    }
}

impl Jet {
    /// A constant series of the given order.
    pub fn constant(value: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "order {order} exceeds {MAX_ORDER}");
        let mut c = [0.0; CAP];
        c[0] = value;
        Jet { order, c }
    }

    /// The bundle `(x, v, 0, …, 0)` with `order + 1` entries.
    ///
    /// Panics if `order` is 0 or larger than [`MAX_ORDER`]; use
    /// [`Jet::from_coeffs`] for fallible construction.
    pub fn seed(x: f64, v: f64, order: usize) -> Self {
        assert!(
            (1..=MAX_ORDER).contains(&order),
            "order {order} outside 1..={MAX_ORDER}"
        );
        let mut c = [0.0; CAP];
        c[0] = x;
        c[1] = v;
        Jet { order, c }
    }

    /// Builds a jet whose order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: &[f64]) -> Result<Self, TaylorError> {
        if coeffs.is_empty() || coeffs.len() > CAP {
            return Err(TaylorError::InvalidOrder(coeffs.len().saturating_sub(1)));
        }
        let mut c = [0.0; CAP];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Jet {
            order: coeffs.len() - 1,
            c,
        })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn coeffs(&self) -> &[f64] {
        &self.c[..=self.order]
    }

    /// Normalized coefficient `k`; zero past the truncation order.
    #[inline]
    pub fn coeff(&self, k: usize) -> f64 {
        if k <= self.order {
            self.c[k]
        } else {
            0.0
        }
    }

    /// `k! · c[k]`, i.e. `D^k f(x)[v, …, v]`.
    pub fn derivative(&self, k: usize) -> Result<f64, TaylorError> {
        if k > self.order {
            return Err(TaylorError::IndexOutOfRange {
                index: k,
                order: self.order,
            });
        }
        Ok(factorial(k) * self.c[k])
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }

    /// Truncates or zero-extends to `order`.
    pub fn with_order(mut self, order: usize) -> Self {
        assert!(order <= MAX_ORDER);
        for k in order + 1..CAP {
            self.c[k] = 0.0;
        }
        self.order = order;
        self
    }

    #[inline]
    fn blank(order: usize) -> Self {
        Jet { order, c: [0.0; CAP] }
    }

    /// `1 / self`, failing when the primal is (numerically) zero.
    pub fn try_recip(&self) -> Result<Self, TaylorError> {
        if !(self.c[0].abs() >= ZERO_PRIMAL_FLOOR) {
            return Err(TaylorError::ZeroPrimal(self.c[0]));
        }
        Ok(recip(self))
    }

    pub fn try_div(&self, rhs: &Jet) -> Result<Self, TaylorError> {
        if !(rhs.c[0].abs() >= ZERO_PRIMAL_FLOOR) {
            return Err(TaylorError::ZeroPrimal(rhs.c[0]));
        }
        Ok(div(self, rhs))
    }

    pub fn try_ln(&self) -> Result<Self, TaylorError> {
        if !(self.c[0] > 0.0) {
            return Err(TaylorError::Domain {
                op: "log",
                value: self.c[0],
            });
        }
        Ok(ln(self))
    }

    pub fn try_sqrt(&self) -> Result<Self, TaylorError> {
        if !(self.c[0] > 0.0) {
            return Err(TaylorError::Domain {
                op: "sqrt",
                value: self.c[0],
            });
        }
        Ok(sqrt(self))
    }

    /// Applies an elementary function with domain checking.
    pub fn apply(&self, op: Elementary) -> Result<Self, TaylorError> {
        match op {
            Elementary::Exp => Ok(exp(self)),
            Elementary::Ln => self.try_ln(),
            Elementary::Sin => Ok(sin_cos(self).0),
            Elementary::Cos => Ok(sin_cos(self).1),
            Elementary::Sqrt => self.try_sqrt(),
            Elementary::Recip => self.try_recip(),
            Elementary::Powi(n) => {
                if n < 0 && !(self.c[0].abs() >= ZERO_PRIMAL_FLOOR) {
                    return Err(TaylorError::ZeroPrimal(self.c[0]));
                }
                Ok(powi(self, n))
            }
            Elementary::Powf(r) => {
                if !(self.c[0] > 0.0) {
                    return Err(TaylorError::Domain {
                        op: "powf",
                        value: self.c[0],
                    });
                }
                Ok(powf(self, r))
            }
        }
    }
}

/// Elementary functions with a dedicated pushforward rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Recip,
    Powi(i32),
    Powf(f64),
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

// Recurrences. Each one writes c[0] with exactly the f64 operation the
// plain-real path uses, so primal values agree bit for bit.

fn mul(a: &Jet, b: &Jet) -> Jet {
    let order = a.order.max(b.order);
    let mut out = Jet::blank(order);
    out.c[0] = a.c[0] * b.c[0];
    for k in 1..=order {
        let mut s = 0.0;
        for j in 0..=k {
            s += a.c[j] * b.c[k - j];
        }
        out.c[k] = s;
    }
    out
}

fn div(a: &Jet, b: &Jet) -> Jet {
    let order = a.order.max(b.order);
    let mut out = Jet::blank(order);
    let b0 = b.c[0];
    out.c[0] = a.c[0] / b0;
    for k in 1..=order {
        let mut s = a.c[k];
        for j in 1..=k {
            s -= b.c[j] * out.c[k - j];
        }
        out.c[k] = s / b0;
    }
    out
}

fn recip(a: &Jet) -> Jet {
    let mut out = Jet::blank(a.order);
    let a0 = a.c[0];
    out.c[0] = 1.0 / a0;
    for k in 1..=a.order {
        let mut s = 0.0;
        for j in 1..=k {
            s += a.c[j] * out.c[k - j];
        }
        out.c[k] = -s / a0;
    }
    out
}

fn exp(a: &Jet) -> Jet {
    let mut out = Jet::blank(a.order);
    out.c[0] = a.c[0].exp();
    for k in 1..=a.order {
        let mut s = 0.0;
        for j in 1..=k {
            s += j as f64 * a.c[j] * out.c[k - j];
        }
        out.c[k] = s / k as f64;
    }
    out
}

fn ln(a: &Jet) -> Jet {
    let mut out = Jet::blank(a.order);
    let a0 = a.c[0];
    out.c[0] = a0.ln();
    for k in 1..=a.order {
        let mut s = 0.0;
        for j in 1..k {
            s += j as f64 * out.c[j] * a.c[k - j];
        }
        out.c[k] = (a.c[k] - s / k as f64) / a0;
    }
    out
}

fn sqrt(a: &Jet) -> Jet {
    let mut out = Jet::blank(a.order);
    out.c[0] = a.c[0].sqrt();
    let two_c0 = 2.0 * out.c[0];
    for k in 1..=a.order {
        let mut s = a.c[k];
        for j in 1..k {
            s -= out.c[j] * out.c[k - j];
        }
        out.c[k] = s / two_c0;
    }
    out
}

fn sin_cos(a: &Jet) -> (Jet, Jet) {
    let mut s = Jet::blank(a.order);
    let mut c = Jet::blank(a.order);
    s.c[0] = a.c[0].sin();
    c.c[0] = a.c[0].cos();
    for k in 1..=a.order {
        let mut ss = 0.0;
        let mut cc = 0.0;
        for j in 1..=k {
            let w = j as f64 * a.c[j];
            ss += w * c.c[k - j];
            cc += w * s.c[k - j];
        }
        s.c[k] = ss / k as f64;
        c.c[k] = -cc / k as f64;
    }
    (s, c)
}

/// `a^r` via `a · g' = r · a' · g`; requires a nonzero primal.
fn pow_recurrence(a: &Jet, r: f64, c0: f64) -> Jet {
    let mut out = Jet::blank(a.order);
    out.c[0] = c0;
    let a0 = a.c[0];
    for k in 1..=a.order {
        let mut s = 0.0;
        for j in 1..=k {
            s += (r * j as f64 - (k - j) as f64) * a.c[j] * out.c[k - j];
        }
        out.c[k] = s / (k as f64 * a0);
    }
    out
}

fn powi(a: &Jet, n: i32) -> Jet {
    let c0 = a.c[0].powi(n);
    if a.c[0] != 0.0 || n < 0 {
        return pow_recurrence(a, n as f64, c0);
    }
    // Zero primal: the recurrence divides by a0, so square-and-multiply.
    let mut result = Jet::constant(1.0, a.order);
    let mut base = *a;
    let mut e = n as u32;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base);
        }
        base = mul(&base, &base);
        e >>= 1;
    }
    result.c[0] = c0;
    result
}

fn powf(a: &Jet, r: f64) -> Jet {
    pow_recurrence(a, r, a.c[0].powf(r))
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(self, rhs: Jet) -> Jet {
        let order = self.order.max(rhs.order);
        let mut out = Jet::blank(order);
        for k in 0..=order {
            out.c[k] = self.c[k] + rhs.c[k];
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(self, rhs: Jet) -> Jet {
        let order = self.order.max(rhs.order);
        let mut out = Jet::blank(order);
        for k in 0..=order {
            out.c[k] = self.c[k] - rhs.c[k];
        }
        out
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, rhs: Jet) -> Jet {
        mul(&self, &rhs)
    }
}

impl Div for Jet {
    type Output = Jet;
    #[inline]
    fn div(self, rhs: Jet) -> Jet {
        div(&self, &rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    #[inline]
    fn neg(mut self) -> Jet {
        for k in 0..=self.order {
            self.c[k] = -self.c[k];
        }
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn mul(mut self, rhs: f64) -> Jet {
        for k in 0..=self.order {
            self.c[k] *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    #[inline]
    fn div(mut self, rhs: f64) -> Jet {
        for k in 0..=self.order {
            self.c[k] /= rhs;
        }
        self
    }
}

impl Scalar for Jet {
    #[inline]
    fn from_f64(c: f64) -> Self {
        Jet::constant(c, 0)
    }
    #[inline]
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn recip(self) -> Self {
        recip(&self)
    }
    fn exp(self) -> Self {
        exp(&self)
    }
    fn ln(self) -> Self {
        ln(&self)
    }
    fn sin(self) -> Self {
        sin_cos(&self).0
    }
    fn cos(self) -> Self {
        sin_cos(&self).1
    }
    fn sqrt(self) -> Self {
        sqrt(&self)
    }
    fn powi(self, n: i32) -> Self {
        powi(&self, n)
    }
    fn powf(self, r: f64) -> Self {
        powf(&self, r)
    }
}

/// A vector-valued Taylor bundle: `coeffs[k][i] = D^k f_i(x)[v, …, v] / k!`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetVec {
    order: usize,
    coeffs: Vec<Vec<f64>>,
}

impl JetVec {
    /// `(x, v, 0, …, 0)` for a vector point and direction.
    pub fn seed(x: &[f64], v: &[f64], order: usize) -> Result<Self, TaylorError> {
        if x.len() != v.len() {
            return Err(TaylorError::ShapeMismatch(x.len(), v.len()));
        }
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(TaylorError::InvalidOrder(order));
        }
        let mut coeffs = vec![vec![0.0; x.len()]; order + 1];
        coeffs[0].copy_from_slice(x);
        coeffs[1].copy_from_slice(v);
        Ok(JetVec { order, coeffs })
    }

    /// Gathers per-component jets, promoting all of them to the largest order.
    pub fn from_jets(jets: &[Jet]) -> Self {
        let order = jets.iter().map(Jet::order).max().unwrap_or(0);
        let coeffs = (0..=order)
            .map(|k| jets.iter().map(|j| j.coeff(k)).collect())
            .collect();
        JetVec { order, coeffs }
    }

    /// One scalar jet per component, ready to feed a residual function.
    pub fn to_jets(&self) -> Vec<Jet> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut j = Jet::blank(self.order);
                for k in 0..=self.order {
                    j.c[k] = self.coeffs[k][i];
                }
                j
            })
            .collect()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.coeffs.first().map_or(0, Vec::len)
    }

    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn derivative(&self, k: usize) -> Result<Vec<f64>, TaylorError> {
        if k > self.order {
            return Err(TaylorError::IndexOutOfRange {
                index: k,
                order: self.order,
            });
        }
        let f = factorial(k);
        Ok(self.coeffs[k].iter().map(|c| f * c).collect())
    }
}

/// Seeds one jet per component of `x` along direction `v`.
pub fn seed_components(x: &[f64], v: &[f64], order: usize) -> Vec<Jet> {
    debug_assert_eq!(x.len(), v.len());
    x.iter()
        .zip(v)
        .map(|(&xi, &vi)| Jet::seed(xi, vi, order))
        .collect()
}
