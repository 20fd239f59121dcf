use thiserror::Error;

/// Errors shared across the covariance-matrix algebra, the transducer model,
/// and the entanglement analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("unphysical state: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("singular resolvent at omega = {omega}")]
    SingularResolvent { omega: f64 },

    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    #[error("pole proximity: |1 - sigma_a C_a - sigma_b C_b| = {margin} below guard {guard}")]
    PoleProximity { margin: f64, guard: f64 },

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("channel is not phase insensitive: x/p mismatch {0}")]
    NotPhaseInsensitive(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
