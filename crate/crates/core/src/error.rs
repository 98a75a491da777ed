use alloc::string::String;
use alloc::vec::Vec;

use crate::SwarSymbol;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Notation text did not match the grammar. `row` and `col` are 1-based
    /// file coordinates; `col` is 0 when the whole row is at fault.
    #[error("parse error at row {row}, cell {col}: {message}")]
    Parse { row: usize, col: usize, message: String },

    #[error("{what} not found: {key}")]
    NotFound { what: &'static str, key: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{value} cents is outside the scale grid (nearest edge swar {nearest})")]
    OutOfRange { value: f64, nearest: SwarSymbol },

    #[error("time {time:.3} s lies outside the beat grid [{start:.3}, {end:.3}]")]
    OutsideGrid { time: f64, start: f64, end: f64 },

    #[error("unknown syllable label {label:?}; valid labels: {}", valid.join(", "))]
    UnknownSyllable { label: String, valid: Vec<String> },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("data error: {0}")]
    Data(String),
}
