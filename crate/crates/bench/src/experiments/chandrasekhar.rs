use std::collections::BTreeMap;

use taylorsolve::halley::NAIVE_HALLEY_MAX_DIM;
use taylorsolve::problems::{chandrasekhar, ChandrasekharConfig};
use taylorsolve::{solve, JacobianStrategy, Method, MvSolveConfig};

use crate::config::{BenchRunConfig, Experiment};
use crate::error::BenchError;
use crate::experiments::brusselator::counter_failures;
use crate::table::{nanos, ChandrasekharRow, Check, Metadata, ResultTable, Rows};
use crate::timing::median_time;

/// Dense-Jacobian solves of the H-equation over sizes, tolerances and
/// methods. NaiveHalley is skipped above 64 unknowns.
pub fn run_chandrasekhar(cfg: &BenchRunConfig) -> Result<ResultTable, BenchError> {
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        let problem = chandrasekhar(ChandrasekharConfig { n, c: cfg.params.c });
        for &tol in &cfg.tols {
            for &method in &cfg.methods {
                if method == Method::NaiveHalley && n > NAIVE_HALLEY_MAX_DIM {
                    continue;
                }
                let solve_cfg = MvSolveConfig {
                    tol,
                    ..MvSolveConfig::new(method, JacobianStrategy::Dense)
                };
                let (report, median) = median_time(cfg.reps, || solve(&problem, &solve_cfg));
                let report = report?;
                rows.push(ChandrasekharRow {
                    n,
                    tol,
                    method,
                    iterations: report.iterations,
                    time_ns: nanos(median),
                    factorizations: report.counters.factorizations,
                    back_solves: report.counters.back_solves,
                    final_residual: report.final_residual(),
                    converged: report.converged(),
                });
            }
        }
    }
    rows.sort_by(|a, b| {
        (a.n, a.method)
            .cmp(&(b.n, b.method))
            .then(b.tol.total_cmp(&a.tol))
    });

    let by_cell: BTreeMap<(usize, u64, Method), &ChandrasekharRow> = rows
        .iter()
        .map(|r| ((r.n, r.tol.to_bits(), r.method), r))
        .collect();
    let iters = |n: usize, tol: f64, m: Method| by_cell.get(&(n, tol.to_bits(), m)).map(|r| r.iterations);

    let mut not_fewer = Vec::new();
    let mut naive_mismatch = Vec::new();
    let mut strict_large = false;
    let mut any_large = false;
    for &n in &cfg.sizes {
        for &tol in &cfg.tols {
            if let (Some(nw), Some(h)) = (iters(n, tol, Method::Newton), iters(n, tol, Method::Halley)) {
                if h > nw {
                    not_fewer.push(format!("n={n} tol={tol:e}: Halley {h} > Newton {nw}"));
                }
                if n >= 64 {
                    any_large = true;
                    strict_large |= h < nw;
                }
            }
            if n <= 16 {
                if let (Some(h), Some(nh)) =
                    (iters(n, tol, Method::Halley), iters(n, tol, Method::NaiveHalley))
                {
                    if h != nh {
                        naive_mismatch.push(format!("n={n} tol={tol:e}: {h} vs {nh}"));
                    }
                }
            }
        }
    }

    let mut checks = vec![
        Check::from_failures(
            "all cells converged",
            rows.iter()
                .filter(|r| !r.converged)
                .map(|r| format!("n={} {:?} tol={:e}", r.n, r.method, r.tol))
                .collect(),
        ),
        Check::from_failures("iterations(Halley) <= iterations(Newton)", not_fewer),
        Check::from_failures("NaiveHalley iterations equal Halley for n <= 16", naive_mismatch),
        Check::from_failures(
            "one factorization and 1 (Newton) or 2 (Halley) back-solves per iteration",
            rows.iter()
                .filter_map(|r| {
                    counter_failures(r.method, r.iterations, r.factorizations, r.back_solves)
                        .map(|e| format!("n={} {:?}: {e}", r.n, r.method))
                })
                .collect(),
        ),
    ];
    if any_large {
        checks.push(Check::new(
            "Halley strictly fewer iterations for some n >= 64",
            strict_large,
            if strict_large {
                "ok"
            } else {
                "no strict improvement"
            },
        ));
    }

    let mut notes = Vec::new();
    let time = |n: usize, m: Method| {
        rows.iter()
            .find(|r| r.n == n && r.method == m && r.tol == cfg.tols[0])
            .map(|r| r.time_ns as f64)
    };
    for &n in &cfg.sizes {
        if let (Some(naive), Some(h)) = (time(n, Method::NaiveHalley), time(n, Method::Halley)) {
            notes.push(format!("n={n}: NaiveHalley/Halley time ratio {:.2}", naive / h));
        }
    }

    Ok(ResultTable {
        experiment: Experiment::Chandrasekhar,
        metadata: Metadata::new(&cfg.tols, cfg.reps, cfg.seed, cfg.params),
        rows: Rows::Chandrasekhar(rows),
        checks,
        notes,
    })
}
