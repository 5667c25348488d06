use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Coherent amplitude exceeds the truncation guard |α|² ≤ n_max/4.
    #[error("coherent amplitude too large for truncation: |alpha|^2 = {alpha_sq:.6} exceeds n_max/4 = {limit:.6}")]
    AmplitudeTooLarge { alpha_sq: f64, limit: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a valid density operator: {0}")]
    NotDensity(String),

    #[error("not a valid observable: {0}")]
    NotObservable(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("Fock index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    /// Conditioning on an outcome whose probability (density) is below tolerance.
    #[error("conditioning on vanishing-probability outcome: {0}")]
    ZeroProbability(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergent(String),

    /// Truncated-space evaluation lost accuracy (e.g. displacement beyond the
    /// reliable region of the Fock cutoff).
    #[error("truncated-space accuracy loss: {0}")]
    AccuracyLoss(String),

    #[error("empty conditioning bin at y = {y} (bin width {width})")]
    EmptyBin { y: f64, width: f64 },

    #[error("internal numerical inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
