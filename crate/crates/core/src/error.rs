//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Process exit code for configuration problems.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit code for numerical failures (eigensolver, Krylov, invariant violations).
pub const EXIT_NUMERICAL: i32 = 3;
/// Process exit code for filesystem problems.
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sector: {0}")]
    InvalidSector(String),

    #[error("site {site} out of range 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("hop requires two distinct sites (got {0} and {0})")]
    SameSiteHop(usize),

    #[error("barrier layout needs an even ring length, got L = {0}")]
    OddRingLength(usize),

    #[error("invalid model parameter: {0}")]
    InvalidParams(String),

    #[error("invalid initial state: {0}")]
    InvalidInitialState(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("operator is not flagged Hermitian")]
    NotHermitian,

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("Krylov propagation did not converge at step {step} (t = {time}): error estimate {estimate:.3e}")]
    KrylovNonConvergence { step: usize, time: f64, estimate: f64 },

    #[error("series length {found} does not match the time grid ({expected} points)")]
    LengthMismatch { expected: usize, found: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed time series: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Exit code for a process that terminates on this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidSector(_)
            | Error::OddRingLength(_)
            | Error::InvalidParams(_)
            | Error::InvalidInitialState(_)
            | Error::InvalidGrid(_)
            | Error::SiteOutOfRange { .. }
            | Error::SameSiteHop(_) => EXIT_CONFIG,
            Error::Io { .. } => EXIT_IO,
            _ => EXIT_NUMERICAL,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
