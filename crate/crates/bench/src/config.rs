//! Run configuration: per-experiment defaults, `key=value` config files and
//! command-line overrides, all parsed by [`BenchRunConfig::set`].

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use taylorsolve::ode::Scheme;
use taylorsolve::{JacobianStrategy, Method};

use crate::error::{config_err, BenchError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Scalar,
    Chandrasekhar,
    Brusselator,
    OdeWp,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Scalar => "scalar",
            Experiment::Chandrasekhar => "chandrasekhar",
            Experiment::Brusselator => "brusselator",
            Experiment::OdeWp => "ode-wp",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "scalar" => Ok(Experiment::Scalar),
            "chandrasekhar" => Ok(Experiment::Chandrasekhar),
            "brusselator" => Ok(Experiment::Brusselator),
            "ode-wp" => Ok(Experiment::OdeWp),
            _ => Err(config_err(format!(
                "unknown experiment `{s}` (expected scalar, chandrasekhar, brusselator or ode-wp)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(config_err(format!("unknown format `{s}` (expected csv or json)"))),
        }
    }
}

/// Physical parameters of the benchmark problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    /// Chandrasekhar scattering constant.
    pub c: f64,
    /// Brusselator `A`, `B`, `alpha`.
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    /// End time of the ODE experiment.
    pub t_end: f64,
}

impl Default for ProblemParams {
    fn default() -> Self {
        ProblemParams {
            c: 0.9,
            a: 3.4,
            b: 1.0,
            alpha: 10.0,
            t_end: 11.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRunConfig {
    pub experiment: Experiment,
    pub sizes: Vec<usize>,
    pub methods: Vec<Method>,
    pub orders: Vec<usize>,
    pub tols: Vec<f64>,
    pub strategies: Vec<JacobianStrategy>,
    pub schemes: Vec<Scheme>,
    pub reps: usize,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub dump_pattern: Option<PathBuf>,
    pub seed: u64,
    pub params: ProblemParams,
}

/// Keys accepted by [`BenchRunConfig::set`].
pub const KEYS: &[&str] = &[
    "sizes",
    "methods",
    "orders",
    "tol",
    "strategies",
    "schemes",
    "reps",
    "format",
    "out",
    "dump-pattern",
    "seed",
    "c",
    "a",
    "b",
    "alpha",
    "t-end",
];

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, BenchError>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| config_err(format!("{key}: `{s}`: {e}")))
        })
        .collect()
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T, BenchError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| config_err(format!("{key}: `{value}`: {e}")))
}

fn parse_strategy(s: &str) -> Result<JacobianStrategy, String> {
    match s.to_ascii_lowercase().as_str() {
        "dense" => Ok(JacobianStrategy::Dense),
        "sparse" => Ok(JacobianStrategy::Sparse),
        _ => Err(format!("unknown jacobian strategy `{s}`")),
    }
}

impl BenchRunConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let mut cfg = BenchRunConfig {
            experiment,
            sizes: Vec::new(),
            methods: vec![Method::Newton, Method::Halley],
            orders: Vec::new(),
            tols: vec![1e-8],
            strategies: vec![JacobianStrategy::Dense, JacobianStrategy::Sparse],
            schemes: Scheme::all().to_vec(),
            reps: 3,
            format: OutputFormat::Csv,
            out: None,
            dump_pattern: None,
            seed: 0,
            params: ProblemParams::default(),
        };
        match experiment {
            Experiment::Scalar => {
                cfg.orders = (1..=5).collect();
                cfg.tols = vec![1e-12];
                cfg.reps = 1000;
            }
            Experiment::Chandrasekhar => {
                cfg.sizes = vec![4, 8, 16, 32, 64, 128];
                cfg.methods = vec![Method::Newton, Method::Halley, Method::NaiveHalley];
            }
            Experiment::Brusselator => {
                cfg.sizes = vec![4, 8, 16, 32];
            }
            Experiment::OdeWp => {
                cfg.sizes = vec![8];
                cfg.tols = vec![1e-2, 1e-3, 1e-4, 1e-5];
                cfg.reps = 1;
            }
        }
        cfg
    }

    /// Sets one option from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), BenchError> {
        let value = value.trim();
        match key {
            "sizes" => self.sizes = parse_list(key, value)?,
            "methods" => self.methods = parse_list(key, value)?,
            "orders" => self.orders = parse_list(key, value)?,
            "tol" | "tols" => self.tols = parse_list(key, value)?,
            "strategies" => {
                self.strategies = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_strategy(s).map_err(|e| config_err(format!("{key}: {e}"))))
                    .collect::<Result<_, _>>()?
            }
            "schemes" => self.schemes = parse_list(key, value)?,
            "reps" => self.reps = parse_one(key, value)?,
            "format" => self.format = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "dump-pattern" => self.dump_pattern = Some(PathBuf::from(value)),
            "seed" => self.seed = parse_one(key, value)?,
            "c" => self.params.c = parse_one(key, value)?,
            "a" => self.params.a = parse_one(key, value)?,
            "b" => self.params.b = parse_one(key, value)?,
            "alpha" => self.params.alpha = parse_one(key, value)?,
            "t-end" | "t_end" => self.params.t_end = parse_one(key, value)?,
            _ => return Err(config_err(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file; blank lines and `#` comments are
    /// ignored.
    pub fn apply_config_text(&mut self, text: &str) -> Result<(), BenchError> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| config_err(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.reps == 0 {
            return Err(config_err("reps must be at least 1"));
        }
        if self.tols.is_empty() || self.tols.iter().any(|t| !(*t > 0.0)) {
            return Err(config_err("tolerances must be positive"));
        }
        if self.sizes.contains(&0) {
            return Err(config_err("sizes must be positive"));
        }
        if self.methods.is_empty() {
            return Err(config_err("at least one method is required"));
        }
        if self.dump_pattern.is_some() && self.experiment != Experiment::Brusselator {
            return Err(config_err(
                "dump-pattern only applies to the brusselator experiment",
            ));
        }
        let p = self.params;
        if !(p.c > 0.0 && p.c < 1.0) {
            return Err(config_err("c must lie in (0, 1)"));
        }
        if !(p.a > 0.0 && p.b > 0.0 && p.alpha > 0.0 && p.t_end > 0.0) {
            return Err(config_err("a, b, alpha and t-end must be positive"));
        }
        match self.experiment {
            Experiment::Scalar => {
                if self.orders.is_empty() || self.orders.iter().any(|o| !(1..=8).contains(o)) {
                    return Err(config_err("orders must be a non-empty subset of 1..=8"));
                }
            }
            Experiment::Chandrasekhar => {
                if self.sizes.is_empty() {
                    return Err(config_err("sizes must not be empty"));
                }
            }
            Experiment::Brusselator | Experiment::OdeWp => {
                if self.sizes.is_empty() || self.sizes.iter().any(|&k| k < 3) {
                    return Err(config_err("Brusselator grid sizes must be at least 3"));
                }
                if self.experiment == Experiment::Brusselator && self.strategies.is_empty() {
                    return Err(config_err("at least one jacobian strategy is required"));
                }
                if self.experiment == Experiment::OdeWp {
                    if self.schemes.is_empty() {
                        return Err(config_err("at least one scheme is required"));
                    }
                    if self.methods.contains(&Method::NaiveHalley) {
                        return Err(config_err("ODE inner solver must be newton or halley"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_overrides_defaults() {
        let mut cfg = BenchRunConfig::defaults(Experiment::Brusselator);
        cfg.apply_config_text(
            "# sweep\nsizes = 4, 8\nmethods=halley\n\nstrategies = sparse # only sparse\nalpha = 2.5\n",
        )
        .unwrap();
        assert_eq!(cfg.sizes, vec![4, 8]);
        assert_eq!(cfg.methods, vec![Method::Halley]);
        assert_eq!(cfg.strategies, vec![JacobianStrategy::Sparse]);
        assert_eq!(cfg.params.alpha, 2.5);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn bad_input_is_rejected() {
        let mut cfg = BenchRunConfig::defaults(Experiment::Scalar);
        assert!(cfg.set("orders", "1,x").is_err());
        assert!(cfg.set("bogus", "1").is_err());
        assert!(cfg.apply_config_text("sizes 4").is_err());
        cfg.set("orders", "0,2").unwrap();
        assert!(cfg.validate().is_err());
        assert!("ode".parse::<Experiment>().is_err());
    }

    #[test]
    fn every_key_is_settable() {
        let samples = [
            ("sizes", "4"),
            ("methods", "newton"),
            ("orders", "2"),
            ("tol", "1e-6"),
            ("strategies", "dense"),
            ("schemes", "trbdf2"),
            ("reps", "2"),
            ("format", "json"),
            ("out", "x.json"),
            ("dump-pattern", "p.txt"),
            ("seed", "7"),
            ("c", "0.5"),
            ("a", "3"),
            ("b", "2"),
            ("alpha", "1"),
            ("t-end", "2"),
        ];
        assert_eq!(samples.len(), KEYS.len());
        let mut cfg = BenchRunConfig::defaults(Experiment::OdeWp);
        for (k, v) in samples {
            assert!(KEYS.contains(&k));
            cfg.set(k, v).unwrap();
        }
        assert_eq!(cfg.format, OutputFormat::Json);
        assert_eq!(cfg.seed, 7);
    }
}
