//! Result rows, pass/fail checks and CSV/JSON output.

use std::io::Write;

use serde::Serialize;
use taylorsolve::ode::Scheme;
use taylorsolve::{JacobianStrategy, Method};

use crate::config::{Experiment, OutputFormat, ProblemParams};
use crate::error::BenchError;
use crate::timing::WARMUPS;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarRow {
    pub function_id: usize,
    pub order: usize,
    pub iterations: usize,
    pub time_per_iter_ns: u64,
    pub total_time_ns: u64,
    pub converged: bool,
    pub root: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChandrasekharRow {
    pub n: usize,
    pub tol: f64,
    pub method: Method,
    pub iterations: usize,
    pub time_ns: u64,
    pub factorizations: usize,
    pub back_solves: usize,
    pub final_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrusselatorRow {
    pub k: usize,
    pub n: usize,
    pub tol: f64,
    pub method: Method,
    pub jacobian_strategy: JacobianStrategy,
    pub num_colors: usize,
    pub iterations: usize,
    pub time_ns: u64,
    pub factorizations: usize,
    pub back_solves: usize,
    pub final_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeWpRow {
    pub k: usize,
    pub scheme: Scheme,
    pub inner: Method,
    pub tolerance: f64,
    pub error: f64,
    pub wall_time_s: f64,
    pub total_steps: usize,
    pub rejected_steps: usize,
    pub total_nonlinear_iterations: usize,
    pub total_factorizations: usize,
    pub total_back_solves: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Rows {
    Scalar(Vec<ScalarRow>),
    Chandrasekhar(Vec<ChandrasekharRow>),
    Brusselator(Vec<BrusselatorRow>),
    OdeWp(Vec<OdeWpRow>),
}

impl Rows {
    pub fn len(&self) -> usize {
        match self {
            Rows::Scalar(r) => r.len(),
            Rows::Chandrasekhar(r) => r.len(),
            Rows::Brusselator(r) => r.len(),
            Rows::OdeWp(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    /// Passes when `failures` is empty; otherwise lists them.
    pub fn from_failures(name: impl Into<String>, failures: Vec<String>) -> Self {
        let passed = failures.is_empty();
        let detail = if passed {
            "ok".to_string()
        } else {
            failures.join("; ")
        };
        Check::new(name, passed, detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub tolerances: Vec<f64>,
    pub repetitions: usize,
    pub warmups: usize,
    pub seed: u64,
    /// How the time columns were obtained.
    pub timing: String,
    /// Convergence criterion of the nonlinear solves.
    pub convergence: String,
    pub params: ProblemParams,
}

impl Metadata {
    pub fn new(tols: &[f64], reps: usize, seed: u64, params: ProblemParams) -> Self {
        Metadata {
            version: env!("CARGO_PKG_VERSION"),
            tolerances: tols.to_vec(),
            repetitions: reps,
            warmups: WARMUPS,
            seed,
            timing: format!("median of {reps} timed runs after {WARMUPS} warmups"),
            convergence: "infinity norm of the residual at or below tol".into(),
            params,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub experiment: Experiment,
    pub metadata: Metadata,
    pub rows: Rows,
    pub checks: Vec<Check>,
    /// Informational observations (timings and ratios); never pass/fail.
    pub notes: Vec<String>,
}

impl ResultTable {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn write<W: Write>(&self, format: OutputFormat, w: W) -> Result<(), BenchError> {
        match format {
            OutputFormat::Csv => self.write_csv(w),
            OutputFormat::Json => self.write_json(w),
        }
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<(), BenchError> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    /// Rows only, with a header line.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), BenchError> {
        let mut out = csv::Writer::from_writer(w);
        match &self.rows {
            Rows::Scalar(rows) => rows.iter().try_for_each(|r| out.serialize(r))?,
            Rows::Chandrasekhar(rows) => rows.iter().try_for_each(|r| out.serialize(r))?,
            Rows::Brusselator(rows) => rows.iter().try_for_each(|r| out.serialize(r))?,
            Rows::OdeWp(rows) => rows.iter().try_for_each(|r| out.serialize(r))?,
        }
        out.flush()?;
        Ok(())
    }
}

/// CSV header of each experiment's rows.
pub fn csv_header(experiment: Experiment) -> &'static str {
    match experiment {
        Experiment::Scalar => {
            "function_id,order,iterations,time_per_iter_ns,total_time_ns,converged,root,abs_error"
        }
        Experiment::Chandrasekhar => {
            "n,tol,method,iterations,time_ns,factorizations,back_solves,final_residual,converged"
        }
        Experiment::Brusselator => {
            "k,n,tol,method,jacobian_strategy,num_colors,iterations,time_ns,factorizations,back_solves,final_residual,converged"
        }
        Experiment::OdeWp => {
            "k,scheme,inner,tolerance,error,wall_time_s,total_steps,rejected_steps,total_nonlinear_iterations,total_factorizations,total_back_solves"
        }
    }
}

pub(crate) fn nanos(d: std::time::Duration) -> u64 {
    u64::try_from(d.as_nanos()).unwrap_or(u64::MAX)
}
