use thiserror::Error;

/// Errors shared by every module. The CLI maps these onto exit codes:
/// `Unsupported` -> 3, `Tolerance` -> 1, everything else -> 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported regime: {0}")]
    Unsupported(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular input: {0}")]
    Singular(String),
    #[error("infeasible size: {0}")]
    Infeasible(String),
    #[error("tolerance not met: requested {requested}, achieved {achieved}")]
    Tolerance { requested: f64, achieved: f64 },
    #[error("stabilization failure: {0}")]
    Stabilization(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
