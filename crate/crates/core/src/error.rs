use thiserror::Error;

use crate::linalg::LinalgError;
use crate::taylor::TaylorError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate step: {0}")]
    Degenerate(String),
    #[error("not enough usable iterates to estimate a convergence order")]
    InsufficientData,
    #[error(transparent)]
    Taylor(#[from] TaylorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
