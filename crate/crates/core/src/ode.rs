//! Implicit trapezoid and TR-BDF2 integrators with a Newton or Halley inner
//! solver and step-doubling error control.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::halley::{solve_with_plan, JacobianStrategy, Method, MvSolveConfig};
use crate::problem::{NonlinearProblem, OdeProblem};
use crate::report::Counters;
use crate::scalar::Scalar;
use crate::sparsity::JacobianPlan;

/// The TR-BDF2 stage fraction, `2 - √2`.
pub const TRBDF2_GAMMA: f64 = 2.0 - std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    Trapezoid,
    #[serde(rename = "TRBDF2")]
    TrBdf2,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Trapezoid => "Trapezoid",
            Scheme::TrBdf2 => "TRBDF2",
        }
    }

    pub fn all() -> [Scheme; 2] {
        [Scheme::Trapezoid, Scheme::TrBdf2]
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "trapezoid" | "trap" => Ok(Scheme::Trapezoid),
            "trbdf2" | "tr-bdf2" => Ok(Scheme::TrBdf2),
            _ => Err(format!("unknown scheme `{s}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("invalid stepper configuration: {0}")]
    InvalidConfig(String),
    #[error("inner nonlinear solve failed at t = {t} with h = {h}")]
    InnerSolveFailed { t: f64, h: f64 },
    #[error("step size {h:e} fell below h_min at t = {t}")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("reference solution has zero norm")]
    ZeroReference,
    #[error("state length mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub scheme: Scheme,
    /// `Newton` or `Halley`.
    pub inner: Method,
    pub abstol: f64,
    pub reltol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Residual tolerance of each stage solve.
    pub inner_tol: f64,
    pub inner_max_iter: usize,
    pub jacobian_strategy: JacobianStrategy,
}

impl StepperConfig {
    /// Tolerances `abstol = reltol = tol`, inner tolerance `0.01·abstol`,
    /// sparse Jacobians.
    pub fn new(scheme: Scheme, inner: Method, tol: f64) -> Self {
        StepperConfig {
            scheme,
            inner,
            abstol: tol,
            reltol: tol,
            h_init: 1e-4,
            h_min: 1e-12,
            h_max: 0.5,
            inner_tol: 0.01 * tol,
            inner_max_iter: 10,
            jacobian_strategy: JacobianStrategy::Sparse,
        }
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        let bad = |m: &str| Err(OdeError::InvalidConfig(m.to_string()));
        if self.inner == Method::NaiveHalley {
            return bad("inner solver must be Newton or Halley");
        }
        if !(self.abstol > 0.0 && self.reltol > 0.0 && self.inner_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.h_min > 0.0 && self.h_min <= self.h_init && self.h_init <= self.h_max) {
            return bad("need 0 < h_min <= h_init <= h_max");
        }
        if self.inner_max_iter == 0 {
            return bad("inner_max_iter must be at least 1");
        }
        Ok(())
    }

    fn inner_config(&self) -> MvSolveConfig {
        MvSolveConfig {
            tol: self.inner_tol,
            max_iter: self.inner_max_iter,
            jacobian_strategy: self.jacobian_strategy,
            method: self.inner,
        }
    }
}

/// Work done by one or more implicit steps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StepStats {
    pub nonlinear_iterations: usize,
    pub counters: Counters,
}

impl std::ops::AddAssign for StepStats {
    fn add_assign(&mut self, rhs: Self) {
        self.nonlinear_iterations += rhs.nonlinear_iterations;
        self.counters += rhs.counters;
    }
}

/// `g(z) = z - base - coef·rhs(t, z)`, started from `guess`.
struct StageResidual<'a, P: ?Sized> {
    problem: &'a P,
    t: f64,
    coef: f64,
    base: &'a [f64],
    guess: &'a [f64],
}

impl<P: OdeProblem + ?Sized> NonlinearProblem for StageResidual<'_, P> {
    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn initial_guess(&self) -> Vec<f64> {
        self.guess.to_vec()
    }

    fn residual<S: Scalar>(&self, z: &[S], out: &mut [S]) {
        let mut f = vec![S::from_f64(0.0); z.len()];
        self.problem.rhs(self.t, z, &mut f);
        for i in 0..z.len() {
            out[i] = z[i].clone() - f[i].clone() * self.coef - self.base[i];
        }
    }
}

/// Jacobian plan for the stage residuals of `problem`, detected once at `y`.
fn stage_plan<P: OdeProblem + ?Sized>(problem: &P, t: f64, y: &[f64]) -> JacobianPlan {
    let stage = StageResidual {
        problem,
        t,
        coef: 1.0,
        base: y,
        guess: y,
    };
    JacobianPlan::for_problem(&stage)
}

fn eval_rhs<P: OdeProblem + ?Sized>(problem: &P, t: f64, y: &[f64], stats: &mut StepStats) -> Vec<f64> {
    let mut f = vec![0.0; y.len()];
    problem.rhs(t, y, &mut f);
    stats.counters.f_evals += 1;
    f
}

struct Stepper<'a, P: ?Sized> {
    problem: &'a P,
    cfg: StepperConfig,
    inner: MvSolveConfig,
    plan: Option<JacobianPlan>,
}

impl<'a, P: OdeProblem + ?Sized> Stepper<'a, P> {
    fn new(problem: &'a P, cfg: &StepperConfig) -> Result<Self, OdeError> {
        cfg.validate()?;
        let y0 = problem.y0();
        if y0.len() != problem.dim() {
            return Err(OdeError::DimensionMismatch {
                expected: problem.dim(),
                got: y0.len(),
            });
        }
        let plan = match cfg.jacobian_strategy {
            JacobianStrategy::Sparse => Some(stage_plan(problem, problem.t0(), &y0)),
            JacobianStrategy::Dense => None,
        };
        Ok(Stepper {
            problem,
            cfg: *cfg,
            inner: cfg.inner_config(),
            plan,
        })
    }

    fn solve_stage(
        &self,
        t_new: f64,
        coef: f64,
        base: &[f64],
        guess: &[f64],
        stats: &mut StepStats,
        fail: OdeError,
    ) -> Result<Vec<f64>, OdeError> {
        let stage = StageResidual {
            problem: self.problem,
            t: t_new,
            coef,
            base,
            guess,
        };
        let report = solve_with_plan(&stage, &self.inner, self.plan.as_ref()).map_err(|_| fail.clone())?;
        stats.nonlinear_iterations += report.iterations;
        stats.counters += report.counters;
        if report.converged() {
            Ok(report.root)
        } else {
            Err(fail)
        }
    }

    fn step(&self, t: f64, y: &[f64], h: f64) -> Result<(Vec<f64>, StepStats), OdeError> {
        if !(h > 0.0) || y.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::InvalidConfig(format!("bad step: h = {h}")));
        }
        let mut stats = StepStats::default();
        let fail = OdeError::InnerSolveFailed { t, h };
        let f0 = eval_rhs(self.problem, t, y, &mut stats);
        let y_next = match self.cfg.scheme {
            Scheme::Trapezoid => {
                let c = 0.5 * h;
                let base: Vec<f64> = y.iter().zip(&f0).map(|(yi, fi)| yi + c * fi).collect();
                self.solve_stage(t + h, c, &base, y, &mut stats, fail)?
            }
            Scheme::TrBdf2 => {
                let g = TRBDF2_GAMMA;
                let c1 = 0.5 * g * h;
                let base1: Vec<f64> = y.iter().zip(&f0).map(|(yi, fi)| yi + c1 * fi).collect();
                let zg = self.solve_stage(t + g * h, c1, &base1, y, &mut stats, fail.clone())?;
                let w = g * (2.0 - g);
                let (wz, wy) = (1.0 / w, (1.0 - g) * (1.0 - g) / w);
                let c2 = (1.0 - g) / (2.0 - g) * h;
                let base2: Vec<f64> = zg.iter().zip(y).map(|(zi, yi)| wz * zi - wy * yi).collect();
                self.solve_stage(t + h, c2, &base2, &zg, &mut stats, fail)?
            }
        };
        Ok((y_next, stats))
    }
}

/// One implicit step of size `h` from `(t, y)`.
///
/// With a sparse Jacobian strategy the stage pattern is detected at `y` for
/// this call; [`integrate`] detects it once per integration instead.
pub fn implicit_step<P: OdeProblem + ?Sized>(
    problem: &P,
    t: f64,
    y: &[f64],
    h: f64,
    cfg: &StepperConfig,
) -> Result<(Vec<f64>, StepStats), OdeError> {
    cfg.validate()?;
    if y.len() != problem.dim() {
        return Err(OdeError::DimensionMismatch {
            expected: problem.dim(),
            got: y.len(),
        });
    }
    let plan = match cfg.jacobian_strategy {
        JacobianStrategy::Sparse => Some(stage_plan(problem, t, y)),
        JacobianStrategy::Dense => None,
    };
    let stepper = Stepper {
        problem,
        cfg: *cfg,
        inner: cfg.inner_config(),
        plan,
    };
    stepper.step(t, y, h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integration {
    pub t: f64,
    pub y: Vec<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub stats: StepStats,
    /// Seconds.
    pub wall_time: f64,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Integrates from `t0` to `t_end` with step-doubling error control.
///
/// Each attempt takes one step of size `h` and two of size `h/2`; the local
/// error estimate is `‖y_half - y_full‖∞ / 3` against
/// `abstol + reltol·‖y‖∞`. The two-half-step result is kept on acceptance.
pub fn integrate<P: OdeProblem + ?Sized>(problem: &P, cfg: &StepperConfig) -> Result<Integration, OdeError> {
    let start = Instant::now();
    let stepper = Stepper::new(problem, cfg)?;
    let t_end = problem.t_end();
    let mut t = problem.t0();
    let mut y = problem.y0();
    let mut h = cfg.h_init;
    let mut out = Integration {
        t,
        y: Vec::new(),
        accepted_steps: 0,
        rejected_steps: 0,
        stats: StepStats::default(),
        wall_time: 0.0,
    };
    let span = (t_end - t).abs().max(1.0);

    while t < t_end - 1e-14 * span {
        if h < cfg.h_min {
            return Err(OdeError::StepSizeUnderflow { t, h });
        }
        let h_try = h.min(t_end - t);
        let attempt = (|| {
            let (full, s1) = stepper.step(t, &y, h_try)?;
            let (mid, s2) = stepper.step(t, &y, 0.5 * h_try)?;
            let (half, s3) = stepper.step(t + 0.5 * h_try, &mid, 0.5 * h_try)?;
            let mut s = s1;
            s += s2;
            s += s3;
            Ok::<_, OdeError>((full, half, s))
        })();

        let (full, half, stats) = match attempt {
            Ok(r) => r,
            Err(OdeError::InnerSolveFailed { .. }) => {
                out.rejected_steps += 1;
                h = 0.5 * h_try;
                continue;
            }
            Err(e) => return Err(e),
        };
        out.stats += stats;

        let diff = full
            .iter()
            .zip(&half)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let err = diff / 3.0;
        let scale = cfg.abstol + cfg.reltol * inf_norm(&y).max(inf_norm(&half));
        let ratio = err / scale;
        let factor = if ratio == 0.0 {
            5.0
        } else {
            (0.9 * ratio.powf(-1.0 / 3.0)).clamp(0.2, 5.0)
        };

        if ratio <= 1.0 && half.iter().all(|v| v.is_finite()) {
            t += h_try;
            y = half;
            out.accepted_steps += 1;
            h = (h_try * factor).min(cfg.h_max);
        } else {
            out.rejected_steps += 1;
            h = h_try * factor.min(0.9);
        }
    }

    out.t = t;
    out.y = y;
    out.wall_time = start.elapsed().as_secs_f64();
    Ok(out)
}

/// Integrates with `steps` equal steps and no error control.
pub fn integrate_fixed<P: OdeProblem + ?Sized>(
    problem: &P,
    cfg: &StepperConfig,
    steps: usize,
) -> Result<Integration, OdeError> {
    if steps == 0 {
        return Err(OdeError::InvalidConfig("need at least one step".into()));
    }
    let start = Instant::now();
    let stepper = Stepper::new(problem, cfg)?;
    let t0 = problem.t0();
    let h = (problem.t_end() - t0) / steps as f64;
    let mut y = problem.y0();
    let mut stats = StepStats::default();
    for i in 0..steps {
        let (next, s) = stepper.step(t0 + i as f64 * h, &y, h)?;
        y = next;
        stats += s;
    }
    Ok(Integration {
        t: problem.t_end(),
        y,
        accepted_steps: steps,
        rejected_steps: 0,
        stats,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// `Σ(yᵢ - refᵢ)² / Σ refᵢ²`.
pub fn relative_l2_error(y: &[f64], y_ref: &[f64]) -> Result<f64, OdeError> {
    if y.len() != y_ref.len() {
        return Err(OdeError::DimensionMismatch {
            expected: y_ref.len(),
            got: y.len(),
        });
    }
    let den: f64 = y_ref.iter().map(|r| r * r).sum();
    if den == 0.0 {
        return Err(OdeError::ZeroReference);
    }
    let num: f64 = y.iter().zip(y_ref).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(num / den)
}

/// Configuration used for reference solutions: TR-BDF2 at `reltol = 1e-10`.
pub fn reference_config() -> StepperConfig {
    let mut cfg = StepperConfig::new(Scheme::TrBdf2, Method::Newton, 1e-10);
    cfg.h_init = 1e-6;
    cfg
}

/// One cell of a work-precision sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkPrecisionRecord {
    pub scheme: Scheme,
    pub inner: Method,
    pub tolerance: f64,
    pub error: f64,
    pub wall_time: f64,
    pub total_steps: usize,
    pub rejected_steps: usize,
    pub total_nonlinear_iterations: usize,
    pub total_factorizations: usize,
    pub total_back_solves: usize,
}

impl WorkPrecisionRecord {
    pub fn from_run(cfg: &StepperConfig, run: &Integration, y_ref: &[f64]) -> Result<Self, OdeError> {
        Ok(WorkPrecisionRecord {
            scheme: cfg.scheme,
            inner: cfg.inner,
            tolerance: cfg.reltol,
            error: relative_l2_error(&run.y, y_ref)?,
            wall_time: run.wall_time,
            total_steps: run.accepted_steps + run.rejected_steps,
            rejected_steps: run.rejected_steps,
            total_nonlinear_iterations: run.stats.nonlinear_iterations,
            total_factorizations: run.stats.counters.factorizations,
            total_back_solves: run.stats.counters.back_solves,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Linear {
        lambda: f64,
        t_end: f64,
    }

    impl OdeProblem for Linear {
        fn dim(&self) -> usize {
            1
        }
        fn t0(&self) -> f64 {
            0.0
        }
        fn t_end(&self) -> f64 {
            self.t_end
        }
        fn y0(&self) -> Vec<f64> {
            vec![1.0]
        }
        fn rhs<S: Scalar>(&self, _t: f64, y: &[S], out: &mut [S]) {
            out[0] = y[0].clone() * self.lambda;
        }
    }

    struct Still;

    impl OdeProblem for Still {
        fn dim(&self) -> usize {
            3
        }
        fn t0(&self) -> f64 {
            0.0
        }
        fn t_end(&self) -> f64 {
            1.0
        }
        fn y0(&self) -> Vec<f64> {
            vec![1.0, -2.0, 0.5]
        }
        fn rhs<S: Scalar>(&self, _t: f64, _y: &[S], out: &mut [S]) {
            out.fill(S::from_f64(0.0));
        }
    }

    #[test]
    fn trapezoid_stiff_scalar_step() {
        let p = Linear {
            lambda: -1e6,
            t_end: 1.0,
        };
        let cfg = StepperConfig::new(Scheme::Trapezoid, Method::Newton, 1e-6);
        let h = 1e-3;
        let (y1, stats) = implicit_step(&p, 0.0, &[1.0], h, &cfg).unwrap();
        let hl = h * p.lambda;
        let exact = (1.0 + hl / 2.0) / (1.0 - hl / 2.0);
        assert!((y1[0] - exact).abs() <= 1e-12, "{} vs {exact}", y1[0]);
        assert_eq!(stats.nonlinear_iterations, 1);
    }

    #[test]
    fn zero_rhs_is_identity() {
        for scheme in Scheme::all() {
            for inner in [Method::Newton, Method::Halley] {
                let cfg = StepperConfig::new(scheme, inner, 1e-6);
                let y = Still.y0();
                let (next, _) = implicit_step(&Still, 0.0, &y, 0.1, &cfg).unwrap();
                assert_eq!(next, y);
            }
        }
    }

    #[test]
    fn decay_to_one() {
        let p = Linear {
            lambda: -1.0,
            t_end: 1.0,
        };
        for scheme in Scheme::all() {
            let cfg = StepperConfig::new(scheme, Method::Halley, 1e-9);
            let run = integrate(&p, &cfg).unwrap();
            assert!(
                (run.y[0] - (-1.0f64).exp()).abs() < 1e-6,
                "{scheme:?}: {}",
                run.y[0]
            );
            assert!((run.t - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn error_metric_examples() {
        let r = [1.0, -2.0, 3.0];
        assert_eq!(relative_l2_error(&r, &r).unwrap(), 0.0);
        assert_eq!(relative_l2_error(&[2.0, -4.0, 6.0], &r).unwrap(), 1.0);
        assert_eq!(relative_l2_error(&r, &[0.0; 3]), Err(OdeError::ZeroReference));
    }

    #[test]
    fn config_validation() {
        let mut cfg = StepperConfig::new(Scheme::Trapezoid, Method::Newton, 1e-4);
        assert!(cfg.validate().is_ok());
        cfg.h_min = 1.0;
        assert!(cfg.validate().is_err());
        let cfg = StepperConfig::new(Scheme::Trapezoid, Method::NaiveHalley, 1e-4);
        assert!(cfg.validate().is_err());
    }
}
