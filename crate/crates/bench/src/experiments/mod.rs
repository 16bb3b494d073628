mod brusselator;
mod chandrasekhar;
mod ode_wp;
mod scalar;

pub(crate) use brusselator::counter_failures;
pub use brusselator::run_brusselator;
pub use chandrasekhar::run_chandrasekhar;
pub use ode_wp::run_ode_wp;
pub(crate) use ode_wp::wp_checks;
pub use scalar::run_scalar;

use crate::config::{BenchRunConfig, Experiment};
use crate::error::BenchError;
use crate::table::ResultTable;

/// Validates `cfg` and runs its experiment.
pub fn run(cfg: &BenchRunConfig) -> Result<ResultTable, BenchError> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Scalar => run_scalar(cfg),
        Experiment::Chandrasekhar => run_chandrasekhar(cfg),
        Experiment::Brusselator => run_brusselator(cfg),
        Experiment::OdeWp => run_ode_wp(cfg),
    }
}
