use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("term {n} is beyond the validity horizon of the rational rotation (denominator {denominator})")]
    HorizonExceeded { n: usize, denominator: u128 },

    #[error("substitution does not satisfy (H2): image of {0:?} does not start with it")]
    NotExtendable(char),

    #[error("substitution is not primitive within {t_max} iterations")]
    NotPrimitive { t_max: u32 },

    #[error("substitution does not satisfy (H1): |psi^t({0:?})| stays bounded")]
    NotGrowing(char),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("digit {digit} at position {position} is not admissible for base {base}")]
    InadmissibleDigit { position: usize, digit: u64, base: u64 },

    #[error("cannot reach the requested precision: {0}")]
    PrecisionUnreachable(String),

    #[error("block lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("sample is empty")]
    EmptySample,

    #[error("bad density: {0}")]
    BadDensity(String),

    #[error("base {base} at position {position} is not a power of {g}")]
    NotGPower { position: usize, base: u64, g: u64 },

    #[error("source exhausted: needed {needed} terms, {available} available")]
    SourceExhausted { needed: usize, available: usize },

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("radix mismatch: pattern product {pattern_product} differs from source base {source_base}")]
    MismatchedRadix { pattern_product: u64, source_base: u64 },

    #[error("model does not support cell geometry: {0}")]
    UnsupportedModel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
