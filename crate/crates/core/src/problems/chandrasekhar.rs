use crate::problem::NonlinearProblem;
use crate::scalar::Scalar;
use crate::sparsity::SparsityPattern;

/// Discretization of the H-equation with constant characteristic `c/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChandrasekharConfig {
    pub n: usize,
    /// Scattering albedo, in `(0, 1)`.
    pub c: f64,
}

impl ChandrasekharConfig {
    pub fn new(n: usize) -> Self {
        ChandrasekharConfig { n, c: 0.9 }
    }
}

/// Midpoint-rule discretization on `μ_i = (i - 1/2)/n`:
///
/// ```text
/// F_i(H) = H_i - (1 - c/(2n) Σ_j μ_i H_j / (μ_i + μ_j))⁻¹
/// ```
///
/// Every equation couples every unknown, so the Jacobian is dense.
#[derive(Debug, Clone)]
pub struct Chandrasekhar {
    cfg: ChandrasekharConfig,
    mu: Vec<f64>,
    /// `kernel[i*n + j] = c μ_i / (2n (μ_i + μ_j))`
    kernel: Vec<f64>,
}

impl Chandrasekhar {
    pub fn config(&self) -> ChandrasekharConfig {
        self.cfg
    }

    pub fn nodes(&self) -> &[f64] {
        &self.mu
    }
}

/// Panics unless `n >= 1` and `0 < c < 1`.
pub fn chandrasekhar(cfg: ChandrasekharConfig) -> Chandrasekhar {
    assert!(cfg.n >= 1, "grid must have at least one node");
    assert!(cfg.c > 0.0 && cfg.c < 1.0, "c must lie in (0, 1)");
    let n = cfg.n;
    let mu: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
    let scale = cfg.c / (2.0 * n as f64);
    let mut kernel = Vec::with_capacity(n * n);
    for &mi in &mu {
        for &mj in &mu {
            kernel.push(scale * mi / (mi + mj));
        }
    }
    Chandrasekhar { cfg, mu, kernel }
}

impl NonlinearProblem for Chandrasekhar {
    fn dim(&self) -> usize {
        self.cfg.n
    }

    fn initial_guess(&self) -> Vec<f64> {
        vec![1.0; self.cfg.n]
    }

    fn residual<S: Scalar>(&self, h: &[S], out: &mut [S]) {
        let n = self.cfg.n;
        for i in 0..n {
            let row = &self.kernel[i * n..(i + 1) * n];
            let mut acc = S::from_f64(0.0);
            for (hj, &w) in h.iter().zip(row) {
                acc = acc + hj.clone() * w;
            }
            let denom = -acc + 1.0;
            out[i] = h[i].clone() - denom.recip();
        }
    }

    fn known_pattern(&self) -> Option<SparsityPattern> {
        Some(SparsityPattern::dense(self.cfg.n))
    }
}
