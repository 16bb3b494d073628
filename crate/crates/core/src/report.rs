use serde::Serialize;

/// Why a solve stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Converged,
    MaxIter,
    /// A derivative or Jacobian degeneracy (zero reciprocal, singular pivot).
    Degenerate,
    /// An iterate or residual became non-finite.
    Diverged,
}

/// Work performed during a solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    /// Residual evaluations in any mode (plain, first or higher order).
    pub f_evals: usize,
    /// Jacobian assemblies.
    pub jacobians: usize,
    pub factorizations: usize,
    pub back_solves: usize,
}

impl std::ops::AddAssign for Counters {
    fn add_assign(&mut self, rhs: Counters) {
        self.f_evals += rhs.f_evals;
        self.jacobians += rhs.jacobians;
        self.factorizations += rhs.factorizations;
        self.back_solves += rhs.back_solves;
    }
}

/// Outcome of a scalar (`X = f64`) or multivariate (`X = Vec<f64>`) solve.
///
/// `residual_history` holds one entry per visited iterate, so it always has
/// `iterations + 1` entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport<X> {
    pub root: X,
    pub status: Status,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub iterate_history: Vec<X>,
    pub counters: Counters,
}

impl<X> SolveReport<X> {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }
}
