use thiserror::Error;

use crate::types::Violation;

pub type Result<T, E = QoeError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QoeError {
    #[error("invalid rating scale: {0}")]
    InvalidScale(String),

    #[error("value {value} lies outside the scale [{lower}, {upper}]")]
    OutOfScale { value: f64, lower: f64, upper: f64 },

    #[error("condition `{0}` has no ratings")]
    EmptySample(String),

    #[error("condition `{condition}` needs at least {needed} ratings, got {got}")]
    InsufficientSamples {
        condition: String,
        needed: usize,
        got: usize,
    },

    #[error("variance radicand {0} is negative beyond rounding tolerance")]
    NegativeRadicand(f64),

    #[error("quantile {n}/{q} requires 0 < n < q")]
    InvalidQuantile { n: u32, q: u32 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no condition carries information about the SOS parameter (all MOS values at the scale bounds)")]
    NoInformation,

    #[error("transmission rating is undefined for MOS {0} (above 4.5)")]
    UndefinedTransmissionRating(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dataset failed validation ({} violation(s)): {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    Validation(Vec<Violation>),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl QoeError {
    /// True for failures reading or decoding input, as opposed to domain or
    /// validation failures.
    pub fn is_input_failure(&self) -> bool {
        matches!(
            self,
            QoeError::Parse { .. } | QoeError::Io(_) | QoeError::Json(_) | QoeError::Csv(_)
        )
    }
}
