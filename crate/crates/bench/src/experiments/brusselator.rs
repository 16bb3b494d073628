use std::fs::File;
use std::io::BufWriter;

use taylorsolve::problems::{brusselator_steady, BrusselatorConfig};
use taylorsolve::sparsity::detect_pattern;
use taylorsolve::{color_columns, solve_with_plan, JacobianPlan, JacobianStrategy, Method, MvSolveConfig};

use crate::config::{BenchRunConfig, Experiment, ProblemParams};
use crate::error::BenchError;
use crate::table::{nanos, BrusselatorRow, Check, Metadata, ResultTable, Rows};
use crate::timing::median_time;

/// `None` when the counters match one factorization and one (Newton) or two
/// (Halley variants) back-solves per iteration.
pub(crate) fn counter_failures(
    method: Method,
    iterations: usize,
    factorizations: usize,
    back_solves: usize,
) -> Option<String> {
    let per = if method == Method::Newton { 1 } else { 2 };
    if factorizations == iterations && back_solves == per * iterations {
        None
    } else {
        Some(format!(
            "{iterations} iterations, {factorizations} factorizations, {back_solves} back-solves"
        ))
    }
}

pub(crate) fn brusselator_config(k: usize, params: &ProblemParams) -> BrusselatorConfig {
    BrusselatorConfig {
        a: params.a,
        b: params.b,
        alpha: params.alpha,
        ..BrusselatorConfig::new(k)
    }
}

/// Steady-state Brusselator solves with dense and sparse Jacobians. In
/// sparse mode the pattern and coloring are computed inside each timed
/// solve.
pub fn run_brusselator(cfg: &BenchRunConfig) -> Result<ResultTable, BenchError> {
    let mut rows = Vec::new();
    let mut pattern_failures = Vec::new();
    for &k in &cfg.sizes {
        let problem = brusselator_steady(brusselator_config(k, &cfg.params));
        let pattern = detect_pattern(&problem);
        let coloring = color_columns(&pattern);
        let n = pattern.dim();
        for (i, row) in pattern.rows().iter().enumerate() {
            if row.len() != 6 {
                pattern_failures.push(format!("K={k} row {i} has {} entries", row.len()));
            }
        }
        if !coloring.is_valid_for(&pattern) {
            pattern_failures.push(format!("K={k}: coloring is not structurally orthogonal"));
        }
        if let (Some(path), true) = (&cfg.dump_pattern, Some(&k) == cfg.sizes.iter().max()) {
            pattern.write_coo(BufWriter::new(File::create(path)?))?;
        }

        for &strategy in &cfg.strategies {
            for &tol in &cfg.tols {
                for &method in &cfg.methods {
                    let solve_cfg = MvSolveConfig {
                        tol,
                        ..MvSolveConfig::new(method, strategy)
                    };
                    let (report, median) = median_time(cfg.reps, || {
                        let plan = match strategy {
                            JacobianStrategy::Sparse => Some(JacobianPlan::for_problem(&problem)),
                            JacobianStrategy::Dense => None,
                        };
                        solve_with_plan(&problem, &solve_cfg, plan.as_ref())
                    });
                    let report = report?;
                    rows.push(BrusselatorRow {
                        k,
                        n,
                        tol,
                        method,
                        jacobian_strategy: strategy,
                        num_colors: match strategy {
                            JacobianStrategy::Sparse => coloring.num_colors(),
                            JacobianStrategy::Dense => n,
                        },
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
    }
    rows.sort_by(|a, b| {
        (a.k, a.jacobian_strategy, a.method)
            .cmp(&(b.k, b.jacobian_strategy, b.method))
            .then(b.tol.total_cmp(&a.tol))
    });

    let find = |k: usize, s: JacobianStrategy, m: Method, tol: f64| {
        rows.iter()
            .find(|r| r.k == k && r.jacobian_strategy == s && r.method == m && r.tol == tol)
    };
    let mut not_fewer = Vec::new();
    for &k in &cfg.sizes {
        for &s in &cfg.strategies {
            for &tol in &cfg.tols {
                if let (Some(nw), Some(h)) =
                    (find(k, s, Method::Newton, tol), find(k, s, Method::Halley, tol))
                {
                    if h.iterations > nw.iterations {
                        not_fewer.push(format!(
                            "K={k} {s:?} tol={tol:e}: Halley {} > Newton {}",
                            h.iterations, nw.iterations
                        ));
                    }
                }
            }
        }
    }

    let checks = vec![
        Check::from_failures(
            "all cells converged",
            rows.iter()
                .filter(|r| !r.converged)
                .map(|r| {
                    format!(
                        "K={} {:?} {:?} tol={:e}",
                        r.k, r.method, r.jacobian_strategy, r.tol
                    )
                })
                .collect(),
        ),
        Check::from_failures("iterations(Halley) <= iterations(Newton)", not_fewer),
        Check::from_failures("6 nonzeros per row and a valid coloring", pattern_failures),
        Check::from_failures(
            "one factorization and 1 (Newton) or 2 (Halley) back-solves per iteration",
            rows.iter()
                .filter_map(|r| {
                    counter_failures(r.method, r.iterations, r.factorizations, r.back_solves)
                        .map(|e| format!("K={} {:?} {:?}: {e}", r.k, r.method, r.jacobian_strategy))
                })
                .collect(),
        ),
    ];

    let mut notes = Vec::new();
    for &k in &cfg.sizes {
        let colors = rows
            .iter()
            .find(|r| r.k == k && r.jacobian_strategy == JacobianStrategy::Sparse)
            .map(|r| r.num_colors);
        if let Some(c) = colors {
            notes.push(format!("K={k}: {c} colors"));
        }
        for &m in &cfg.methods {
            let t = |s| find(k, s, m, cfg.tols[0]).map(|r| r.time_ns as f64);
            if let (Some(d), Some(s)) = (t(JacobianStrategy::Dense), t(JacobianStrategy::Sparse)) {
                notes.push(format!("K={k} {m:?}: dense/sparse time ratio {:.2}", d / s));
            }
        }
    }

    Ok(ResultTable {
        experiment: Experiment::Brusselator,
        metadata: Metadata::new(&cfg.tols, cfg.reps, cfg.seed, cfg.params),
        rows: Rows::Brusselator(rows),
        checks,
        notes,
    })
}
