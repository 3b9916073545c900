use thiserror::Error;

/// Errors raised by the algebra routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("model mismatch")]
    ModelMismatch,
    #[error("level underflow: operation needs level >= {needed}, got {level}")]
    LevelUnderflow { level: u32, needed: u32 },
    #[error("precision overflow: p^{level} does not fit in 63 bits")]
    Precision { level: u32 },
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("coefficient not divisible by p^{needed}")]
    CoefficientValuation { needed: u32 },
    #[error("not representable in normal form: {0}")]
    NotIntegral(String),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
