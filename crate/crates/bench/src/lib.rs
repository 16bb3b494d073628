//! Benchmark harness: experiment runners, result tables and the acceptance
//! suite behind the `bench` binary.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod experiments;
pub mod table;
pub mod timing;

pub use config::{BenchRunConfig, Experiment, OutputFormat, ProblemParams};
pub use error::BenchError;
pub use table::{Check, ResultTable};
