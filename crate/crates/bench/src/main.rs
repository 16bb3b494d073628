use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use taylorsolve_bench::acceptance::{criteria, CriterionReport};
use taylorsolve_bench::{experiments, BenchError, BenchRunConfig, Experiment};

/// Runs a benchmark experiment or the acceptance suite.
///
/// Options are applied in order: experiment defaults, then `--config`, then
/// any flags given on the command line. Exit status is 0 when every check
/// passes, 1 when a check fails and 2 on errors.
#[derive(Parser, Debug)]
#[command(name = "bench", version)]
struct Cli {
    /// scalar, chandrasekhar, brusselator, ode-wp or acceptance.
    experiment: String,
    /// File of `key = value` lines using the long flag names as keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem sizes: n for chandrasekhar, K for brusselator and ode-wp.
    #[arg(long)]
    sizes: Option<String>,
    /// Newton, Halley, NaiveHalley.
    #[arg(long)]
    methods: Option<String>,
    /// Householder orders for the scalar experiment.
    #[arg(long)]
    orders: Option<String>,
    /// Tolerance, or a comma-separated ladder for ode-wp.
    #[arg(long)]
    tol: Option<String>,
    /// dense, sparse.
    #[arg(long)]
    strategies: Option<String>,
    /// Trapezoid, TRBDF2.
    #[arg(long)]
    schemes: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// Writes the detected Jacobian pattern as `row col` lines.
    #[arg(long)]
    dump_pattern: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    t_end: Option<String>,
    /// Acceptance only: criterion numbers to run, default all.
    #[arg(long)]
    criteria: Option<String>,
}

impl Cli {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        let flags = [
            ("sizes", &self.sizes),
            ("methods", &self.methods),
            ("orders", &self.orders),
            ("tol", &self.tol),
            ("strategies", &self.strategies),
            ("schemes", &self.schemes),
            ("reps", &self.reps),
            ("format", &self.format),
            ("out", &self.out),
            ("dump-pattern", &self.dump_pattern),
            ("seed", &self.seed),
            ("c", &self.c),
            ("a", &self.a),
            ("b", &self.b),
            ("alpha", &self.alpha),
            ("t-end", &self.t_end),
        ];
        flags
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect()
    }
}

fn open_output(out: Option<&PathBuf>) -> Result<Box<dyn Write>, BenchError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run_experiment(cli: &Cli, experiment: Experiment) -> Result<bool, BenchError> {
    let mut cfg = BenchRunConfig::defaults(experiment);
    if let Some(path) = &cli.config {
        cfg.apply_config_text(&fs::read_to_string(path)?)?;
    }
    for (key, value) in cli.overrides() {
        cfg.set(key, value)?;
    }
    let table = experiments::run(&cfg)?;
    let mut w = open_output(cfg.out.as_ref())?;
    table.write(cfg.format, &mut w)?;
    w.flush()?;
    for check in &table.checks {
        eprintln!(
            "{} {}: {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    for note in &table.notes {
        eprintln!("note: {note}");
    }
    Ok(table.all_passed())
}

fn run_acceptance(cli: &Cli) -> Result<bool, BenchError> {
    let mut seed = 0;
    let mut out = None;
    if let Some(path) = &cli.config {
        let mut cfg = BenchRunConfig::defaults(Experiment::Scalar);
        cfg.apply_config_text(&fs::read_to_string(path)?)?;
        seed = cfg.seed;
        out = cfg.out;
    }
    if let Some(s) = &cli.seed {
        seed = s
            .trim()
            .parse()
            .map_err(|e| BenchError::Config(format!("seed: `{s}`: {e}")))?;
    }
    if let Some(o) = &cli.out {
        out = Some(PathBuf::from(o));
    }
    let selected: Option<Vec<u8>> = cli
        .criteria
        .as_deref()
        .map(|list| {
            list.split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|e| BenchError::Config(format!("criteria: `{s}`: {e}")))
                })
                .collect()
        })
        .transpose()?;
    let mut w = open_output(out.as_ref())?;
    let mut reports: Vec<CriterionReport> = Vec::new();
    for c in criteria() {
        if selected.as_ref().is_some_and(|s| !s.contains(&c.id)) {
            continue;
        }
        let report = c.run(seed);
        writeln!(w, "{report}")?;
        w.flush()?;
        reports.push(report);
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    writeln!(w, "{passed}/{} criteria passed", reports.len())?;
    w.flush()?;
    Ok(passed == reports.len())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = if cli.experiment == "acceptance" {
        run_acceptance(&cli)
    } else {
        cli.experiment
            .parse::<Experiment>()
            .and_then(|e| run_experiment(&cli, e))
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
