use rayon::prelude::*;
use taylorsolve::ode::{integrate, reference_config, Scheme, StepperConfig, WorkPrecisionRecord};
use taylorsolve::problems::brusselator_rhs;
use taylorsolve::Method;

use crate::config::{BenchRunConfig, Experiment};
use crate::error::BenchError;
use crate::experiments::brusselator::brusselator_config;
use crate::table::{Check, Metadata, OdeWpRow, ResultTable, Rows};
use crate::timing::median_time;

/// Work-precision sweep of the time-dependent Brusselator. Errors are
/// measured against a TR-BDF2 run at `reltol = 1e-10`.
pub fn run_ode_wp(cfg: &BenchRunConfig) -> Result<ResultTable, BenchError> {
    let mut rows = Vec::new();
    let mut failed_cells = Vec::new();
    let mut notes = Vec::new();

    for &k in &cfg.sizes {
        let problem = brusselator_rhs(brusselator_config(k, &cfg.params)).with_t_end(cfg.params.t_end);
        let reference = integrate(&problem, &reference_config())?;
        notes.push(format!(
            "K={k}: reference run took {} steps in {:.1} s",
            reference.accepted_steps, reference.wall_time
        ));

        let cells: Vec<(Scheme, Method, f64)> = cfg
            .schemes
            .iter()
            .flat_map(|&s| {
                cfg.methods
                    .iter()
                    .flat_map(move |&m| cfg.tols.iter().map(move |&t| (s, m, t)))
            })
            .collect();
        let results: Vec<_> = cells
            .par_iter()
            .map(|&(scheme, inner, tol)| {
                let step_cfg = StepperConfig::new(scheme, inner, tol);
                let (run, median) = median_time(cfg.reps, || integrate(&problem, &step_cfg));
                let record = run.map_err(BenchError::from).and_then(|run| {
                    let mut rec = WorkPrecisionRecord::from_run(&step_cfg, &run, &reference.y)?;
                    rec.wall_time = median.as_secs_f64();
                    Ok(rec)
                });
                ((scheme, inner, tol), record)
            })
            .collect();

        for ((scheme, inner, tol), record) in results {
            match record {
                Ok(r) => rows.push(OdeWpRow {
                    k,
                    scheme: r.scheme,
                    inner: r.inner,
                    tolerance: r.tolerance,
                    error: r.error,
                    wall_time_s: r.wall_time,
                    total_steps: r.total_steps,
                    rejected_steps: r.rejected_steps,
                    total_nonlinear_iterations: r.total_nonlinear_iterations,
                    total_factorizations: r.total_factorizations,
                    total_back_solves: r.total_back_solves,
                }),
                Err(e) => failed_cells.push(format!("K={k} {scheme:?} {inner:?} tol={tol:e}: {e}")),
            }
        }
    }
    rows.sort_by(|a, b| {
        (a.k, a.scheme, a.inner)
            .cmp(&(b.k, b.scheme, b.inner))
            .then(b.tolerance.total_cmp(&a.tolerance))
    });

    let checks = wp_checks(&rows, cfg, failed_cells);
    Ok(ResultTable {
        experiment: Experiment::OdeWp,
        metadata: Metadata::new(&cfg.tols, cfg.reps, cfg.seed, cfg.params),
        rows: Rows::OdeWp(rows),
        checks,
        notes,
    })
}

/// Pass/fail properties of a work-precision table.
pub(crate) fn wp_checks(rows: &[OdeWpRow], cfg: &BenchRunConfig, failed_cells: Vec<String>) -> Vec<Check> {
    let mut tols = cfg.tols.clone();
    tols.sort_by(|a, b| b.total_cmp(a));
    tols.dedup();
    let find = |k: usize, s: Scheme, m: Method, t: f64| {
        rows.iter()
            .find(|r| r.k == k && r.scheme == s && r.inner == m && r.tolerance == t)
    };

    let mut not_decreasing = Vec::new();
    let mut more_work = Vec::new();
    let mut diverging = Vec::new();
    for &k in &cfg.sizes {
        for &s in &cfg.schemes {
            for &m in &cfg.methods {
                let errs: Vec<f64> = tols
                    .iter()
                    .filter_map(|&t| find(k, s, m, t))
                    .map(|r| r.error)
                    .collect();
                if errs.windows(2).any(|w| !(w[1] < w[0])) {
                    not_decreasing.push(format!("K={k} {s:?} {m:?}: {errs:?}"));
                }
            }
            for (i, &t) in tols.iter().enumerate() {
                let (Some(nw), Some(h)) = (find(k, s, Method::Newton, t), find(k, s, Method::Halley, t))
                else {
                    continue;
                };
                if i + 2 >= tols.len() && h.total_nonlinear_iterations > nw.total_nonlinear_iterations {
                    more_work.push(format!(
                        "K={k} {s:?} tol={t:e}: Halley {} > Newton {}",
                        h.total_nonlinear_iterations, nw.total_nonlinear_iterations
                    ));
                }
                if (h.error.log10() - nw.error.log10()).abs() >= 0.5 {
                    diverging.push(format!("K={k} {s:?} tol={t:e}: {:e} vs {:e}", nw.error, h.error));
                }
            }
        }
    }

    vec![
        Check::from_failures("all cells completed", failed_cells),
        Check::from_failures("error decreases as tolerance tightens", not_decreasing),
        Check::from_failures(
            "Halley nonlinear iterations <= Newton at the two tightest tolerances",
            more_work,
        ),
        Check::from_failures(
            "Newton and Halley inner errors agree within half an order of magnitude",
            diverging,
        ),
        Check::from_failures(
            "Halley back-solves = 2 x nonlinear iterations",
            rows.iter()
                .filter(|r| {
                    r.inner == Method::Halley && r.total_back_solves != 2 * r.total_nonlinear_iterations
                })
                .map(|r| format!("K={} {:?} tol={:e}", r.k, r.scheme, r.tolerance))
                .collect(),
        ),
    ]
}
