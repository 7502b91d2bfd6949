use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed WAV: {0}")]
    MalformedWav(String),

    #[error("unsupported WAV encoding: {0}")]
    UnsupportedEncoding(String),

    #[error("bad feature-file magic: expected \"VCFEAT01\", found {0:?}")]
    BadMagic([u8; 8]),

    #[error("truncated feature file: expected {expected} bytes, found {found}")]
    TruncatedFile { expected: usize, found: usize },

    #[error("dimension mismatch in {what}: {left} vs {right}")]
    DimMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("signal too short: {len} samples, need at least {needed}")]
    SignalTooShort { len: usize, needed: usize },

    #[error("empty sequence: {0}")]
    EmptySequence(&'static str),

    #[error("degenerate warp-factor denominator: cos(pi*(f_src+f_tgt)/f_s) = {0:e}")]
    DegenerateDenominator(f64),

    #[error("non-finite warp cost: {0}")]
    NonFiniteCost(f64),

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("warp out of range: {0}")]
    WarpOutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors that indicate numerically broken input rather than bad files or flags.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::DegenerateDenominator(_) | Error::NonFiniteCost(_))
    }

    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io(_) => "IoError",
            Error::MalformedWav(_) => "MalformedWav",
            Error::UnsupportedEncoding(_) => "UnsupportedEncoding",
            Error::BadMagic(_) => "BadMagic",
            Error::TruncatedFile { .. } => "TruncatedFile",
            Error::DimMismatch { .. } => "DimMismatch",
            Error::SignalTooShort { .. } => "SignalTooShort",
            Error::EmptySequence(_) => "EmptySequence",
            Error::DegenerateDenominator(_) => "DegenerateDenominator",
            Error::NonFiniteCost(_) => "NonFiniteCost",
            Error::ConfigMismatch(_) => "ConfigMismatch",
            Error::WarpOutOfRange(_) => "WarpOutOfRange",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Json(_) => "JsonError",
        }
    }
}
