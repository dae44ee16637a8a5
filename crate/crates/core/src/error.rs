use thiserror::Error;

/// Errors raised by the estimators, the risk machinery and the I/O layer.
#[derive(Debug, Error)]
pub enum SbiteError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("column {column} has zero variance")]
    ZeroVariance { column: usize },

    #[error("block {block}: Gram matrix is not positive definite")]
    SingularBlock { block: usize },

    #[error("gradient system is singular on the active set; use a smoothness s > 1")]
    SingularGradientSystem,

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("root not bracketed in [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    RootBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SbiteError {
    /// True for errors caused by bad arguments or malformed files, as opposed
    /// to numerical failures.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            SbiteError::InvalidInput(_)
                | SbiteError::Config(_)
                | SbiteError::Format(_)
                | SbiteError::Io(_)
                | SbiteError::Csv(_)
                | SbiteError::Json(_)
                | SbiteError::ZeroVariance { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, SbiteError>;
