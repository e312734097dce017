use thiserror::Error;

/// Errors raised by grid, norm and verification operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("region [{lo}, {hi}] (with margin {margin}) outside valid domain [{valid_lo}, {valid_hi}]")]
    RegionOutsideDomain {
        lo: f64,
        hi: f64,
        margin: f64,
        valid_lo: f64,
        valid_hi: f64,
    },

    #[error("domain margin violated: {0}")]
    MarginViolation(String),

    #[error("empty domain: {0}")]
    EmptyDomain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("sequence is not monotone at index {index}")]
    NonMonotone { index: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("function is not tagged smooth; numerical differentiation refused")]
    NotSmooth,

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by a region or window not fitting in the valid domain.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::RegionOutsideDomain { .. } | Error::MarginViolation(_) | Error::EmptyDomain(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
