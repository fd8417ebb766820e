use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Probability-zero events such as an exactly singular partial product.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// The working precision could not resolve the spectrum; retry with more bits.
    #[error("insufficient precision at {bits} bits: {detail}; retry with at least {suggested_bits} bits")]
    Precision {
        bits: u32,
        suggested_bits: u32,
        detail: String,
    },

    #[error("accuracy target not met: {0}")]
    Accuracy(String),

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
