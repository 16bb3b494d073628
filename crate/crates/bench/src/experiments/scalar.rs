use taylorsolve::problems::univariate_suite;
use taylorsolve::{householder_solve, ScalarSolveConfig, Status};

use crate::config::{BenchRunConfig, Experiment};
use crate::error::BenchError;
use crate::table::{nanos, Check, Metadata, ResultTable, Rows, ScalarRow};
use crate::timing::median_time;

/// Householder orders `cfg.orders` on the six scalar equations.
pub fn run_scalar(cfg: &BenchRunConfig) -> Result<ResultTable, BenchError> {
    let tol = cfg.tols[0];
    let mut rows = Vec::new();
    for case in univariate_suite() {
        for &order in &cfg.orders {
            let solve_cfg = ScalarSolveConfig {
                order,
                tol,
                max_iter: 100,
            };
            let (report, median) = median_time(cfg.reps, || householder_solve(&case, case.x0, &solve_cfg));
            let report = report?;
            let total = nanos(median);
            rows.push(ScalarRow {
                function_id: case.id,
                order,
                iterations: report.iterations,
                time_per_iter_ns: total / report.iterations.max(1) as u64,
                total_time_ns: total,
                converged: report.status == Status::Converged,
                root: report.root,
                abs_error: (report.root - case.reference_root).abs(),
            });
        }
    }

    let mut checks = vec![
        Check::from_failures(
            "all cells converged",
            rows.iter()
                .filter(|r| !r.converged)
                .map(|r| format!("f{} p={}", r.function_id, r.order))
                .collect(),
        ),
        Check::from_failures(
            "roots match references to 1e-10",
            rows.iter()
                .filter(|r| !(r.abs_error <= 1e-10))
                .map(|r| format!("f{} p={}: error {:e}", r.function_id, r.order, r.abs_error))
                .collect(),
        ),
    ];
    if cfg.orders.contains(&1) && cfg.orders.contains(&2) {
        let it = |id: usize, p: usize| {
            rows.iter()
                .find(|r| r.function_id == id && r.order == p)
                .map(|r| r.iterations)
                .unwrap_or(0)
        };
        checks.push(Check::from_failures(
            "iterations(p=2) <= iterations(p=1)",
            (1..=6)
                .filter(|&id| it(id, 2) > it(id, 1))
                .map(|id| format!("f{id}: {} > {}", it(id, 2), it(id, 1)))
                .collect(),
        ));
    }

    Ok(ResultTable {
        experiment: Experiment::Scalar,
        metadata: Metadata::new(&cfg.tols[..1], cfg.reps, cfg.seed, cfg.params),
        rows: Rows::Scalar(rows),
        checks,
        notes: Vec::new(),
    })
}
