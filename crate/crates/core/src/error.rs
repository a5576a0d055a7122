use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A pair of balls with kappa outside `[1, N]`.
    #[error(
        "condition 1 <= kappa <= N violated for pair (p={p_a}, p={p_b}): kappa = {kappa}, N = {dim}; \
         normalize the family first"
    )]
    KappaRange {
        p_a: String,
        p_b: String,
        kappa: f64,
        dim: usize,
    },

    #[error("out of range: {0}")]
    Range(String),

    #[error("parameter domain: {0}")]
    Domain(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("q = inf is handled by the l_inf estimator, not the finite-q dispatcher")]
    RedirectToLinf,

    #[error("internal logic error: {0}")]
    Internal(String),

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidInput(_) => 2,
            Error::KappaRange { .. } | Error::Range(_) | Error::Domain(_) | Error::RedirectToLinf => 3,
            Error::UnsupportedRegime(_) => 4,
            Error::Internal(_) | Error::Io { .. } => 1,
        }
    }
}
