use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("point outside the open domain: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no convergence after {iterations} iterations on [{lo}, {hi}]")]
    NoConvergence { lo: f64, hi: f64, iterations: usize },

    #[error("regime n={n}, d={d} is not solvable by this library")]
    Unsolvable { n: usize, d: usize },

    #[error("degenerate sample rate {rate:.5} exceeds the limit {limit}")]
    DegenerateRate { rate: f64, limit: f64 },

    #[error("ensemble descriptors differ; cannot merge")]
    DescriptorMismatch,

    #[error("insufficient samples: have {have}, need {need}")]
    InsufficientSamples { have: u64, need: u64 },

    #[error("moments undefined: {0}")]
    UndefinedMoments(String),

    #[error("quadrature error estimate {estimate:.3e} above tolerance {tolerance:.3e}")]
    QuadratureTolerance { estimate: f64, tolerance: f64 },

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
