use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    #[error("integration failed: error estimate {estimate:e} exceeds tolerance {tolerance:e} after {evaluations} evaluations")]
    Integration {
        estimate: f64,
        tolerance: f64,
        evaluations: usize,
    },

    #[error("could not bracket root for tail mass {target}: {detail}")]
    Bracketing { target: f64, detail: String },

    #[error("index {index} out of range [0, {bound}) for {kind} ensemble")]
    IndexOutOfRange {
        index: usize,
        bound: usize,
        kind: &'static str,
    },

    #[error("operation `{operation}` requires a {expected} ensemble")]
    KindMismatch {
        operation: &'static str,
        expected: &'static str,
    },

    #[error("coefficient overflow: log magnitude {log_value} is not representable")]
    Overflow { log_value: f64 },

    #[error("inconsistent measure `{label}`: {detail}")]
    Consistency { label: String, detail: String },

    #[error("free energy is already in {0} geometry")]
    GeometryMismatch(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        function,
        detail: detail.into(),
    }
}
