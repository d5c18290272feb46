use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The parameters fall outside the regime an operation is defined for.
    #[error("regime error: {0}")]
    Regime(String),

    /// The requested combination is not supported (e.g. ultra-slow with b != 2).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// No sign change of the first-moment residual was found in the scan window.
    #[error(
        "no root in scan window [{lo}, {hi}]: phi(lo) = {phi_lo}, phi(hi) = {phi_hi}"
    )]
    NoRoot {
        lo: f64,
        hi: f64,
        phi_lo: f64,
        phi_hi: f64,
    },

    /// An iterative numerical method failed to converge.
    #[error("numerical failure in {method}: {detail}")]
    Numeric { method: &'static str, detail: String },

    /// Invalid configuration (simulation, CLI, files).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn regime(msg: impl Into<String>) -> Self {
        Error::Regime(msg.into())
    }

    /// Whether the error is a numerical failure rather than a usage problem.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NoRoot { .. } | Error::Numeric { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
