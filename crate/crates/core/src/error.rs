use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the model operations.
///
/// [`Error::InvalidParameter`] and [`Error::LengthMismatch`] mean the caller handed in
/// something outside the documented input domain. The remaining variants are domain
/// failures: the inputs were well formed but the requested quantity does not exist.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("length mismatch: expected {expected} components, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("component index {index} out of range for {len} components")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("every strategy is allowed; no compliance penalty is defined")]
    NoDisallowedStrategy,
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// `true` for failures of a well-formed request (as opposed to malformed input).
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::NoDisallowedStrategy)
    }
}

pub(crate) fn check_finite(field: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(field, format!("must be finite, got {v}")))
    }
}

pub(crate) fn check_nonneg(field: &'static str, v: f64) -> Result<f64> {
    check_finite(field, v)?;
    if v < 0.0 {
        return Err(Error::invalid(field, format!("must be >= 0, got {v}")));
    }
    Ok(v)
}

pub(crate) fn check_positive(field: &'static str, v: f64) -> Result<f64> {
    check_finite(field, v)?;
    if v <= 0.0 {
        return Err(Error::invalid(field, format!("must be > 0, got {v}")));
    }
    Ok(v)
}

pub(crate) fn check_unit(field: &'static str, v: f64) -> Result<f64> {
    check_finite(field, v)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(
            field,
            format!("must lie in [0, 1], got {v}"),
        ));
    }
    Ok(v)
}
