use thiserror::Error;

/// Errors produced by the memoryflow toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where an operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is invalid (bad horizon/step ratio, bad grid, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller broke an operation contract (wrong history length, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A numerical procedure failed to reach its target.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The requested combination of kernel and operation is not available.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
