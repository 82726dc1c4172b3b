use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    /// Invalid parameters: grid sizes, exponents, window bounds, names.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural invariant failed (filter orthonormality, bisection bracket, ...).
    #[error("invariant violation in {module}: {check}")]
    Invariant { module: &'static str, check: String },

    #[error("unsupported regularity: {0}")]
    UnsupportedRegularity(String),

    /// A ratio whose denominator vanishes.
    #[error("undefined ratio: {0}")]
    Undefined(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub(crate) fn invariant(module: &'static str, check: impl Into<String>) -> Self {
        LabError::Invariant {
            module,
            check: check.into(),
        }
    }
}
