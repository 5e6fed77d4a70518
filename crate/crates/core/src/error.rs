//! Crate-wide error type.

/// Convenience alias used by every fallible operation in the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure classes for the whole crate.
///
/// The split mirrors how callers react: `Domain`/`Config` are caller mistakes,
/// `Data` means the supplied observations are unusable, and `Fit`,
/// `NotConverged`, and `SingularDesign` are estimation failures that a backtest
/// may tolerate up to its skip ceiling.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the operation's stated domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is invalid or inconsistent.
    #[error("config error: {0}")]
    Config(String),

    /// Input data cannot be used (missing values, bad timestamps, emptiness).
    #[error("data error: {0}")]
    Data(String),

    /// An estimator failed on otherwise valid input.
    #[error("fit failed: {0}")]
    Fit(String),

    /// An iterative solver ran out of iterations; `best` is the last iterate.
    #[error("solver did not converge after {iterations} iterations (last step {last_step:.3e})")]
    NotConverged {
        iterations: usize,
        last_step: f64,
        best: Vec<f64>,
    },

    /// A regression design matrix is rank deficient.
    #[error("singular design matrix: rank {rank} of {cols} columns")]
    SingularDesign { rank: usize, cols: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Shorthand for [`Error::Domain`].
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Shorthand for [`Error::Config`].
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Shorthand for [`Error::Data`].
    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    /// Shorthand for [`Error::Fit`].
    pub fn fit(msg: impl Into<String>) -> Self {
        Error::Fit(msg.into())
    }
}
