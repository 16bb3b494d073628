//! Benchmark problems: six scalar equations, the discretized Chandrasekhar
//! H-equation and the 2D Brusselator (steady and time-dependent).

mod brusselator;
mod chandrasekhar;
mod univariate;

pub use brusselator::{
    brusselator_rhs, brusselator_steady, source_term, BrusselatorConfig, BrusselatorOde, BrusselatorSteady,
    SOURCE_ONSET,
};
pub use chandrasekhar::{chandrasekhar, Chandrasekhar, ChandrasekharConfig};
pub use univariate::{univariate_suite, UnivariateCase};
