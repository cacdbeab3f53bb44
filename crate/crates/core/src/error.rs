use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid oscillator parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("wave functions live on different grids")]
    GridMismatch,

    #[error("grid too narrow: edge amplitude {amplitude:.3e} exceeds {limit:.1e}")]
    EdgeAmplitude { amplitude: f64, limit: f64 },

    #[error("state is not normalized (norm = {norm})")]
    Unnormalized { norm: f64 },

    #[error("density maximum sits on the domain boundary at x = {x}")]
    PeakOnBoundary { x: f64 },

    #[error("quadrature failed to converge on [{a}, {b}]")]
    QuadratureFailed { a: f64, b: f64 },

    #[error("closed form is singular: {0}")]
    DegenerateDenominator(String),

    #[error("time {t} outside the closed-form range [0, {t_max}]")]
    OutOfRange { t: f64, t_max: f64 },

    #[error("operator product exceeds degree two")]
    DegreeOverflow,

    #[error("Heisenberg fit residual {residual:.3e} above {limit:.1e}")]
    OracleFit { residual: f64, limit: f64 },

    #[error("propagation aborted at t = {t}: {reason}")]
    PropagationAborted { t: f64, reason: String },

    #[error("occupations up to n = {n_max} capture only {captured:.6} of the probability")]
    OccupationCapture { n_max: usize, captured: f64 },

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("incompatible data: {0}")]
    Schema(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse grouping used to pick process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: configuration, parameters, files, schemas.
    Input,
    /// A computation could not be completed within its tolerances.
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParams(_)
            | Error::InvalidGrid(_)
            | Error::GridMismatch
            | Error::InvalidPulse(_)
            | Error::Config(_)
            | Error::Schema(_)
            | Error::Io { .. }
            | Error::Csv(_)
            | Error::DegenerateDenominator(_) => ErrorClass::Input,
            Error::EdgeAmplitude { .. }
            | Error::Unnormalized { .. }
            | Error::PeakOnBoundary { .. }
            | Error::QuadratureFailed { .. }
            | Error::OutOfRange { .. }
            | Error::DegreeOverflow
            | Error::OracleFit { .. }
            | Error::PropagationAborted { .. }
            | Error::OccupationCapture { .. } => ErrorClass::Numerical,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
