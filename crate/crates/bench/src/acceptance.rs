//! The ten acceptance criteria, each runnable on its own.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taylorsolve::halley::{halley_step, naive_halley_step};
use taylorsolve::linalg::dense_jacobian;
use taylorsolve::ode::{integrate, reference_config, Scheme, StepperConfig, WorkPrecisionRecord};
use taylorsolve::problems::*;
use taylorsolve::sparsity::compressed_jacobian;
use taylorsolve::{
    color_columns, detect_pattern, empirical_order, eval_residual, householder_solve, lu_factor, solve,
    Elementary, JacobianStrategy, Jet, Matrix, Method, MvSolveConfig, NonlinearProblem, Scalar,
    ScalarSolveConfig, SolveReport, Status, UnivariateFn,
};

use crate::config::{BenchRunConfig, Experiment};
use crate::experiments::counter_failures;
use crate::table::OdeWpRow;

type Outcome = Result<String, String>;

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub limit: Duration,
    run: fn(u64) -> Outcome,
}

impl Criterion {
    pub fn run(&self, seed: u64) -> CriterionReport {
        let start = Instant::now();
        let outcome = (self.run)(seed);
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if elapsed > self.limit {
            passed = false;
            detail = format!("{detail}; exceeded the {:?} runtime limit", self.limit);
        }
        CriterionReport {
            id: self.id,
            title: self.title,
            passed,
            detail,
            elapsed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {} ({:.2} s): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion {
            id: 1,
            title: "scalar suite",
            limit: secs(5),
            run: scalar_suite,
        },
        Criterion {
            id: 2,
            title: "convergence order",
            limit: secs(1),
            run: convergence_order,
        },
        Criterion {
            id: 3,
            title: "Halley matches NaiveHalley",
            limit: secs(30),
            run: naive_equivalence,
        },
        Criterion {
            id: 4,
            title: "work accounting",
            limit: secs(600),
            run: work_accounting,
        },
        Criterion {
            id: 5,
            title: "iteration advantage",
            limit: secs(600),
            run: iteration_advantage,
        },
        Criterion {
            id: 6,
            title: "sparsity correctness",
            limit: secs(30),
            run: sparsity_correctness,
        },
        Criterion {
            id: 7,
            title: "affine exactness",
            limit: secs(60),
            run: affine_exactness,
        },
        Criterion {
            id: 8,
            title: "steady-state analytic check",
            limit: secs(60),
            run: steady_state,
        },
        Criterion {
            id: 9,
            title: "ODE work-precision",
            limit: secs(900),
            run: ode_work_precision,
        },
        Criterion {
            id: 10,
            title: "AD engine properties",
            limit: secs(60),
            run: ad_properties,
        },
    ]
}

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    criteria().iter().map(|c| c.run(seed)).collect()
}

fn verdict(failures: Vec<String>, ok: String) -> Outcome {
    if failures.is_empty() {
        Ok(ok)
    } else {
        Err(failures.join("; "))
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn scalar_suite(_seed: u64) -> Outcome {
    let suite = univariate_suite();
    // W(1) solves w·e^w = 1.
    let omega = bisect(|w| w * w.exp() - 1.0, 0.0, 1.0);
    let oracles = [
        2f64.sqrt(),
        std::f64::consts::PI.powi(2),
        omega,
        bisect(|x| suite[3].eval(x), 3.5, 4.5),
        bisect(|x| suite[4].eval(x), 0.0, 1.0),
        omega,
    ];
    let mut failures = Vec::new();
    for (case, &oracle) in suite.iter().zip(&oracles) {
        for p in 1..=5 {
            let cfg = ScalarSolveConfig {
                order: p,
                tol: 1e-12,
                max_iter: 100,
            };
            match householder_solve(case, case.x0, &cfg) {
                Ok(r) if r.status == Status::Converged && (r.root - oracle).abs() <= 1e-10 => {}
                Ok(r) => failures.push(format!(
                    "f{} p={p}: {:?} root {} vs {oracle}",
                    case.id, r.status, r.root
                )),
                Err(e) => failures.push(format!("f{} p={p}: {e}", case.id)),
            }
        }
    }
    verdict(failures, "30 cells converged, roots within 1e-10".into())
}

fn convergence_order(_seed: u64) -> Outcome {
    let f1 = univariate_suite()[0];
    let mut found = Vec::new();
    let mut failures = Vec::new();
    for p in 1..=3 {
        let r = householder_solve(&f1, 1.0, &ScalarSolveConfig::with_order(p)).map_err(|e| e.to_string())?;
        let q = empirical_order(&r.iterate_history, 2f64.sqrt()).map_err(|e| e.to_string())?;
        found.push(format!("p={p}: {q:.3}"));
        let (lo, hi) = (p as f64 + 0.5, p as f64 + 1.5);
        if !(lo..=hi).contains(&q) {
            failures.push(format!("p={p}: {q} outside [{lo}, {hi}]"));
        }
    }
    verdict(failures, found.join(", "))
}

fn step_pair<P: NonlinearProblem>(p: &P) -> Result<(Vec<f64>, Vec<f64>), String> {
    let x = p.initial_guess();
    let fx: Vec<f64> = eval_residual(p, &x);
    let factors = lu_factor(&Matrix::Dense(dense_jacobian(p, &x))).map_err(|e| e.to_string())?;
    Ok((
        halley_step(p, &x, &factors, &fx),
        naive_halley_step(p, &x, &factors, &fx),
    ))
}

fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

fn naive_equivalence(_seed: u64) -> Outcome {
    let mut gaps = Vec::new();
    let mut failures = Vec::new();
    let mut record = |label: String, pair: Result<(Vec<f64>, Vec<f64>), String>| match pair {
        Ok((h, nh)) => {
            let g = relative_gap(&h, &nh);
            if !(g <= 1e-9) {
                failures.push(format!("{label}: gap {g:e}"));
            }
            gaps.push(format!("{label} {g:.1e}"));
        }
        Err(e) => failures.push(format!("{label}: {e}")),
    };
    for n in [4, 8, 16] {
        record(
            format!("n={n}"),
            step_pair(&chandrasekhar(ChandrasekharConfig::new(n))),
        );
    }
    record(
        "K=3".into(),
        step_pair(&brusselator_steady(BrusselatorConfig::new(3))),
    );
    verdict(failures, format!("relative gaps: {}", gaps.join(", ")))
}

struct Affine {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl Affine {
    fn random(n: usize, rng: &mut ChaCha8Rng) -> Self {
        let a = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| rng.gen_range(-1.0..1.0) + if i == j { n as f64 } else { 0.0 })
                    .collect()
            })
            .collect();
        let b = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Affine { a, b }
    }
}

impl NonlinearProblem for Affine {
    fn dim(&self) -> usize {
        self.b.len()
    }
    fn initial_guess(&self) -> Vec<f64> {
        vec![0.0; self.b.len()]
    }
    fn residual<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        for (i, row) in self.a.iter().enumerate() {
            let mut acc = S::from_f64(-self.b[i]);
            for (xj, &aij) in x.iter().zip(row) {
                acc = acc + xj.clone() * aij;
            }
            out[i] = acc;
        }
    }
}

fn work_accounting(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runs: Vec<(String, Method, SolveReport<Vec<f64>>)> = Vec::new();
    let mut push =
        |label: String, method: Method, r: Result<SolveReport<Vec<f64>>, _>| -> Result<(), String> {
            let r = r.map_err(|e: taylorsolve::SolveError| format!("{label}: {e}"))?;
            runs.push((label, method, r));
            Ok(())
        };
    for method in [Method::Newton, Method::Halley, Method::NaiveHalley] {
        for n in [4, 16, 64, 128] {
            if method == Method::NaiveHalley && n > 16 {
                continue;
            }
            let p = chandrasekhar(ChandrasekharConfig::new(n));
            push(
                format!("chandrasekhar n={n} {method:?}"),
                method,
                solve(&p, &MvSolveConfig::new(method, JacobianStrategy::Dense)),
            )?;
        }
        if method == Method::NaiveHalley {
            continue;
        }
        for k in [4, 8, 16] {
            let p = brusselator_steady(BrusselatorConfig::new(k));
            for s in [JacobianStrategy::Dense, JacobianStrategy::Sparse] {
                if s == JacobianStrategy::Dense && k > 8 {
                    continue;
                }
                push(
                    format!("brusselator K={k} {s:?} {method:?}"),
                    method,
                    solve(&p, &MvSolveConfig::new(method, s)),
                )?;
            }
        }
        let p = Affine::random(20, &mut rng);
        push(
            format!("affine n=20 {method:?}"),
            method,
            solve(&p, &MvSolveConfig::default_with(method)),
        )?;
    }
    // Stage solves inside one short implicit integration.
    let ode = brusselator_rhs(BrusselatorConfig::new(4)).with_t_end(0.5);
    let mut ode_failures = Vec::new();
    for inner in [Method::Newton, Method::Halley] {
        let run =
            integrate(&ode, &StepperConfig::new(Scheme::TrBdf2, inner, 1e-4)).map_err(|e| e.to_string())?;
        if let Some(e) = counter_failures(
            inner,
            run.stats.nonlinear_iterations,
            run.stats.counters.factorizations,
            run.stats.counters.back_solves,
        ) {
            ode_failures.push(format!("ODE {inner:?}: {e}"));
        }
    }
    let mut failures: Vec<String> = runs
        .iter()
        .filter_map(|(label, m, r)| {
            counter_failures(
                *m,
                r.iterations,
                r.counters.factorizations,
                r.counters.back_solves,
            )
            .map(|e| format!("{label}: {e}"))
        })
        .collect();
    failures.extend(ode_failures);
    verdict(
        failures,
        format!("{} solves and 2 integrations checked", runs.len()),
    )
}

trait DefaultWith {
    fn default_with(method: Method) -> Self;
}

impl DefaultWith for MvSolveConfig {
    fn default_with(method: Method) -> Self {
        MvSolveConfig::new(method, JacobianStrategy::Dense)
    }
}

fn iteration_advantage(_seed: u64) -> Outcome {
    let mut failures = Vec::new();
    let mut strict = Vec::new();
    let mut summary = Vec::new();
    let mut compare =
        |label: String, large: bool, newton: SolveReport<Vec<f64>>, halley: SolveReport<Vec<f64>>| {
            if !newton.converged() || !halley.converged() {
                failures.push(format!(
                    "{label}: Newton {:?}, Halley {:?}",
                    newton.status, halley.status
                ));
                return;
            }
            if halley.iterations > newton.iterations {
                failures.push(format!(
                    "{label}: Halley {} > Newton {}",
                    halley.iterations, newton.iterations
                ));
            }
            if large && halley.iterations < newton.iterations {
                strict.push(label.clone());
            }
            summary.push(format!("{label} {}/{}", halley.iterations, newton.iterations));
        };
    let cfg = |m| MvSolveConfig {
        tol: 1e-8,
        ..MvSolveConfig::new(m, JacobianStrategy::Dense)
    };
    for n in [4, 8, 16, 32, 64, 128] {
        let p = chandrasekhar(ChandrasekharConfig::new(n));
        let (Ok(nw), Ok(h)) = (solve(&p, &cfg(Method::Newton)), solve(&p, &cfg(Method::Halley))) else {
            return Err(format!("chandrasekhar n={n}: solver error"));
        };
        compare(format!("chandrasekhar n={n}"), n >= 64, nw, h);
    }
    let sparse = |m| MvSolveConfig {
        tol: 1e-8,
        ..MvSolveConfig::new(m, JacobianStrategy::Sparse)
    };
    for k in [4, 8, 16, 32] {
        let p = brusselator_steady(BrusselatorConfig::new(k));
        let (Ok(nw), Ok(h)) = (
            solve(&p, &sparse(Method::Newton)),
            solve(&p, &sparse(Method::Halley)),
        ) else {
            return Err(format!("brusselator K={k}: solver error"));
        };
        compare(format!("brusselator K={k}"), 2 * k * k >= 64, nw, h);
    }
    if strict.is_empty() {
        failures.push("no strict improvement for any n >= 64".into());
    }
    verdict(
        failures,
        format!(
            "Halley/Newton iterations: {}; strict at {}",
            summary.join(", "),
            strict.join(", ")
        ),
    )
}

fn sparsity_correctness(_seed: u64) -> Outcome {
    let mut failures = Vec::new();
    let mut info = Vec::new();
    for k in [4, 8] {
        let p = brusselator_steady(BrusselatorConfig::new(k));
        let x = p.initial_guess();
        let pattern = detect_pattern(&p);
        let coloring = color_columns(&pattern);
        let n = pattern.dim();
        if let Some((i, r)) = pattern.rows().iter().enumerate().find(|(_, r)| r.len() != 6) {
            failures.push(format!("K={k} row {i} has {} entries", r.len()));
        }
        // Pairwise scan: same-colored columns must not share a row.
        let cols = pattern.columns();
        let colors = coloring.colors();
        for a in 0..n {
            for b in a + 1..n {
                if colors[a] == colors[b] && cols[a].iter().any(|r| cols[b].contains(r)) {
                    failures.push(format!("K={k}: columns {a} and {b} share a color and a row"));
                }
            }
        }
        let sparse = compressed_jacobian(&p, &x, &pattern, &coloring).to_dense();
        let dense = dense_jacobian(&p, &x);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((sparse[(i, j)] - dense[(i, j)]).abs());
            }
        }
        if !(worst <= 1e-10) {
            failures.push(format!("K={k}: max entry difference {worst:e}"));
        }
        info.push(format!(
            "K={k}: {} colors, max diff {worst:.1e}",
            coloring.num_colors()
        ));
    }
    verdict(failures, info.join(", "))
}

fn affine_exactness(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut failures = Vec::new();
    for n in [5, 50] {
        let p = Affine::random(n, &mut rng);
        for method in [Method::Newton, Method::Halley] {
            match solve(&p, &MvSolveConfig::default_with(method)) {
                Ok(r) if r.converged() && r.iterations == 1 => {}
                Ok(r) => failures.push(format!("n={n} {method:?}: {:?} after {}", r.status, r.iterations)),
                Err(e) => failures.push(format!("n={n} {method:?}: {e}")),
            }
        }
    }
    verdict(
        failures,
        "n = 5, 50 converged in one iteration for Newton and Halley".into(),
    )
}

struct Started<P> {
    inner: P,
    x0: Vec<f64>,
}

impl<P: NonlinearProblem> NonlinearProblem for Started<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn initial_guess(&self) -> Vec<f64> {
        self.x0.clone()
    }
    fn residual<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        self.inner.residual(x, out)
    }
}

fn steady_state(seed: u64) -> Outcome {
    let k = 8;
    let kk = k * k;
    let homogeneous: Vec<f64> = (0..2 * kk).map(|i| if i < kk { 1.0 } else { 3.4 }).collect();
    let p = brusselator_steady(BrusselatorConfig::new(k).without_source());
    let r: Vec<f64> = eval_residual(&p, &homogeneous);
    let norm = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut failures = Vec::new();
    if !(norm < 1e-13) {
        failures.push(format!("residual at (1, 3.4) is {norm:e}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let x0: Vec<f64> = homogeneous
        .iter()
        .map(|v| v * (1.0 + rng.gen_range(-0.01..0.01)))
        .collect();
    let started = Started { inner: p, x0 };
    let tol = 1e-8;
    for method in [Method::Newton, Method::Halley] {
        let cfg = MvSolveConfig {
            tol,
            ..MvSolveConfig::new(method, JacobianStrategy::Sparse)
        };
        match solve(&started, &cfg) {
            Ok(r) if r.converged() => {
                let dist = r
                    .root
                    .iter()
                    .zip(&homogeneous)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                if dist > 1e-6 {
                    failures.push(format!("{method:?} converged {dist:e} away from (1, 3.4)"));
                }
            }
            Ok(r) => failures.push(format!("{method:?}: {:?}", r.status)),
            Err(e) => failures.push(format!("{method:?}: {e}")),
        }
    }
    verdict(
        failures,
        format!("residual {norm:e}; both methods recovered the state"),
    )
}

fn ode_work_precision(_seed: u64) -> Outcome {
    let k = 8;
    let problem = brusselator_rhs(BrusselatorConfig::new(k));
    let reference = integrate(&problem, &reference_config()).map_err(|e| format!("reference: {e}"))?;
    let tols = [1e-2, 1e-3, 1e-4, 1e-5];
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for scheme in Scheme::all() {
        for inner in [Method::Newton, Method::Halley] {
            for tol in tols {
                let cfg = StepperConfig::new(scheme, inner, tol);
                match integrate(&problem, &cfg)
                    .and_then(|run| WorkPrecisionRecord::from_run(&cfg, &run, &reference.y))
                {
                    Ok(r) => rows.push(OdeWpRow {
                        k,
                        scheme,
                        inner,
                        tolerance: tol,
                        error: r.error,
                        wall_time_s: r.wall_time,
                        total_steps: r.total_steps,
                        rejected_steps: r.rejected_steps,
                        total_nonlinear_iterations: r.total_nonlinear_iterations,
                        total_factorizations: r.total_factorizations,
                        total_back_solves: r.total_back_solves,
                    }),
                    Err(e) => failed.push(format!("{scheme:?} {inner:?} {tol:e}: {e}")),
                }
            }
        }
    }
    let mut cfg = BenchRunConfig::defaults(Experiment::OdeWp);
    cfg.sizes = vec![k];
    cfg.tols = tols.to_vec();
    // Criterion 9 gates on completion, monotone error and the work ordering.
    let checks = crate::experiments::wp_checks(&rows, &cfg, failed);
    let failures: Vec<String> = checks
        .iter()
        .take(3)
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    let summary: Vec<String> = rows
        .iter()
        .filter(|r| r.tolerance <= 1e-4)
        .map(|r| {
            format!(
                "{:?}/{:?}@{:e}: {} it",
                r.scheme, r.inner, r.tolerance, r.total_nonlinear_iterations
            )
        })
        .collect();
    verdict(failures, format!("16 cells completed; {}", summary.join(", ")))
}

fn ad_properties(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    let cases: usize = 1000;
    let mut failures = Vec::new();
    let random_jet = |rng: &mut ChaCha8Rng, p: usize| {
        let c: Vec<f64> = (0..=p).map(|_| rng.gen_range(-2.0..2.0)).collect();
        Jet::from_coeffs(&c).unwrap()
    };
    let mag = |j: &Jet| j.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let gap = |a: &Jet, b: &Jet| {
        a.coeffs()
            .iter()
            .zip(b.coeffs())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    };

    let mut ring_bad = 0;
    for _ in 0..cases {
        let p = rng.gen_range(1..=8);
        let (a, b, c) = (
            random_jet(&mut rng, p),
            random_jet(&mut rng, p),
            random_jet(&mut rng, p),
        );
        let s2 = (9.0 * mag(&a) * mag(&b)).max(1.0);
        let s3 = (81.0 * mag(&a) * mag(&b) * mag(&c)).max(1.0);
        let sd = (9.0 * mag(&a) * (mag(&b) + mag(&c))).max(1.0);
        if gap(&(a * b), &(b * a)) > 1e-13 * s2
            || gap(&((a * b) * c), &(a * (b * c))) > 1e-13 * s3
            || gap(&(a * (b + c)), &(a * b + a * c)) > 1e-13 * sd
        {
            ring_bad += 1;
        }
    }
    if ring_bad > 0 {
        failures.push(format!("ring axioms failed in {ring_bad} of {cases} cases"));
    }

    let mut recip_bad = 0;
    for _ in 0..cases {
        let p = rng.gen_range(1..=8);
        let mut c: Vec<f64> = random_jet(&mut rng, p).coeffs().to_vec();
        c[0] = rng.gen_range(0.1..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let f = Jet::from_coeffs(&c).unwrap();
        let g = f.try_recip().unwrap();
        let prod = f * g;
        let bad = (0..=p).any(|k| {
            let terms: f64 = (0..=k).map(|j| (f.coeff(j) * g.coeff(k - j)).abs()).sum();
            let target = if k == 0 { 1.0 } else { 0.0 };
            (prod.coeff(k) - target).abs() > 1e-12 * terms.max(1.0)
        });
        if bad {
            recip_bad += 1;
        }
    }
    if recip_bad > 0 {
        failures.push(format!(
            "reciprocal inverse failed in {recip_bad} of {cases} cases"
        ));
    }

    let ops: [(Elementary, f64, f64, Option<f64>); 10] = [
        (Elementary::Exp, -2.0, 2.0, None),
        (Elementary::Ln, 0.8, 3.0, Some(0.0)),
        (Elementary::Sin, -3.0, 3.0, None),
        (Elementary::Cos, -3.0, 3.0, None),
        (Elementary::Sqrt, 0.8, 3.0, Some(0.0)),
        (Elementary::Recip, 0.8, 3.0, Some(0.0)),
        (Elementary::Powi(3), -2.0, 2.0, None),
        (Elementary::Powi(-2), 0.8, 3.0, Some(0.0)),
        (Elementary::Powf(2.5), 0.8, 3.0, Some(0.0)),
        (Elementary::Powf(-0.7), 0.8, 3.0, Some(0.0)),
    ];
    let mut fd_checked = 0;
    let mut fd_bad = Vec::new();
    for _ in 0..25 {
        for &(op, lo, hi, singular) in &ops {
            let x: f64 = rng.gen_range(lo..hi);
            let jet = Jet::seed(x, 1.0, 4).apply(op).map_err(|e| e.to_string())?;
            let g = |t: f64| Jet::constant(t, 0).apply(op).unwrap().coeff(0);
            let h0 = singular.map_or(0.2, |s| (0.25 * (x - s)).min(0.2));
            for k in 1..=4 {
                let ad = jet.derivative(k).unwrap();
                let fd = richardson_derivative(&g, x, k, h0);
                if (ad - fd).abs() / ad.abs().max(1.0) > 1e-6 {
                    fd_bad.push(format!("{op:?} x={x} k={k}"));
                }
                fd_checked += 1;
            }
        }
    }
    if !fd_bad.is_empty() {
        failures.push(format!("finite-difference oracle failed: {}", fd_bad.join(", ")));
    }
    verdict(
        failures,
        format!("{cases} ring cases, {cases} reciprocal cases, {fd_checked} derivative comparisons"),
    )
}

/// Central differences of order `k ≤ 4` with a Richardson tableau over five
/// step halvings.
fn richardson_derivative(g: &dyn Fn(f64) -> f64, x: f64, k: usize, h0: f64) -> f64 {
    let stencil = |h: f64| match k {
        1 => (g(x + h) - g(x - h)) / (2.0 * h),
        2 => (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h),
        3 => (g(x + 2.0 * h) - 2.0 * g(x + h) + 2.0 * g(x - h) - g(x - 2.0 * h)) / (2.0 * h.powi(3)),
        _ => (g(x + 2.0 * h) - 4.0 * g(x + h) + 6.0 * g(x) - 4.0 * g(x - h) + g(x - 2.0 * h)) / h.powi(4),
    };
    let levels = 5;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for i in 0..levels {
        let mut row = vec![stencil(h0 / 2f64.powi(i as i32))];
        for j in 1..=i {
            let f = 4f64.powi(j as i32);
            row.push((f * row[j - 1] - table[i - 1][j - 1]) / (f - 1.0));
        }
        table.push(row);
    }
    let mut best = table[1][1];
    let mut best_delta = f64::INFINITY;
    for i in 2..levels {
        let delta = (table[i][i] - table[i - 1][i - 1]).abs();
        if delta < best_delta {
            best_delta = delta;
            best = table[i][i];
        }
    }
    best
}
