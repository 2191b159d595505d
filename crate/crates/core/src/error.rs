use thiserror::Error;

/// Errors raised by samplers, model evaluation, pricing and the experiment harness.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum HestonError {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Evaluation would overflow or leave the numerically safe range.
    #[error("domain error: {0}")]
    Domain(String),

    /// An internal consistency check failed (e.g. a moment became negative).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Experiment or scheme configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// Table serialization or parsing failed.
    #[error("table error: {0}")]
    Table(String),
}

pub type Result<T> = std::result::Result<T, HestonError>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(HestonError::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(HestonError::InvalidParameter {
            name,
            value,
            reason: "must be non-negative and finite",
        })
    }
}
