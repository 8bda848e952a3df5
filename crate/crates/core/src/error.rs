//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by feature extraction, augmentation, evaluation, and I/O.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Underlying I/O failure, with the path that was being accessed.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// The file is not a well-formed RIFF/WAVE container.
    #[error("malformed WAV file {path}: {detail}")]
    MalformedWav { path: PathBuf, detail: String },

    /// The WAV file is valid but uses an encoding this crate does not read
    /// (anything other than 16/24/32-bit integer PCM or 32-bit float).
    #[error("unsupported WAV encoding in {path}: {detail}")]
    UnsupportedWav { path: PathBuf, detail: String },

    /// A clip's sample rate does not match what the pipeline was configured for.
    /// Resampling is never performed implicitly.
    #[error("sample rate mismatch: clip is {actual} Hz, pipeline expects {expected} Hz")]
    SampleRateMismatch { expected: u32, actual: u32 },

    /// An operation that needs at least one sample/frame/element got none.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Two inputs that must agree in shape or length do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The input is degenerate for the requested statistic (e.g. constant
    /// input has no defined skewness).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Reference and estimate event lists disagree on vocabulary or duration.
    #[error("evaluation inputs disagree: {0}")]
    EvalMismatch(String),

    /// A `.npy` file (or a buffer claiming to be one) violates the format.
    #[error("npy format error in {path}: {detail}")]
    NpyFormat { path: PathBuf, detail: String },

    /// Non-finite values appeared where finite ones are required.
    #[error("non-finite value: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
