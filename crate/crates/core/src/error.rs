use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numerical,
    Io,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Config => 2,
            ErrorClass::Numerical => 3,
            ErrorClass::Io => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("permanent of a {size}x{size} matrix exceeds the size guard ({max})")]
    SizeGuard { size: usize, max: usize },

    #[error("detector count {detectors} does not match emitter count {emitters}")]
    CountMismatch { detectors: usize, emitters: usize },

    #[error("closed form is singular at r = {r:e} m; request the limit value explicitly")]
    SingularPoint { r: f64 },

    #[error("quadrature did not converge (relative change {change:e} > tolerance {tolerance:e}); trace: {trace:?}")]
    NonConvergence {
        change: f64,
        tolerance: f64,
        /// (subdivisions, |U|) pairs in evaluation order.
        trace: Vec<(usize, f64)>,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("visibility is undefined for an all-zero signal")]
    UndefinedVisibility,

    #[error("envelope value at index {index} is not positive ({value:e})")]
    NonPositiveEnvelope { index: usize, value: f64 },

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    ConfigParse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    ConfigValidation { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed data: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::ConfigParse { .. } | Error::ConfigValidation { .. } => ErrorClass::Config,
            Error::InvalidParameter { .. } | Error::ContractViolation(_) => ErrorClass::Config,
            Error::Io { .. } | Error::Format { .. } => ErrorClass::Io,
            Error::SizeGuard { .. }
            | Error::CountMismatch { .. }
            | Error::SingularPoint { .. }
            | Error::NonConvergence { .. }
            | Error::InsufficientData(_)
            | Error::UndefinedVisibility
            | Error::NonPositiveEnvelope { .. }
            | Error::InvalidSignal(_) => ErrorClass::Numerical,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
