//! Multi-rate per-channel energy normalization for sound event detection.
//!
//! This crate turns audio clips into time-frequency representations built
//! around per-channel energy normalization (PCEN): a mel spectrogram is
//! divided by a smoothed version of itself, then compressed, which cancels
//! slowly varying gains (channel response, distance, room) while keeping
//! transient structure. The central object is the *multi-rate* stack, which
//! applies the normalization at a bank of smoother rates spanning
//! milliseconds to seconds and stacks the results into one
//! `(bands, frames, rates)` array, so downstream models can see foreground
//! events against backgrounds that drift at any speed.
//!
//! Around that core the crate provides:
//!
//! - a WAV front end, STFT, and mel filterbank ([`audio`], [`stft`], [`mel`]);
//! - batch and sample-exact streaming PCEN ([`pcen`], [`stream`]);
//! - acoustic augmentations — measured or synthetic reverb, pitch shifting,
//!   and Brownian noise beds ([`augment`]);
//! - segment-based detection metrics with a seeded bootstrap ([`eval`]);
//! - NPY import/export for interchange with Python tooling ([`npy`]).
//!
//! Everything is deterministic: all randomness flows through caller-provided
//! seeds, and the streaming path reproduces the batch path bit for bit.

pub mod audio;
pub mod augment;
pub mod error;
pub mod eval;
pub mod frame;
pub mod mel;
pub mod npy;
pub mod pcen;
pub mod stats;
pub mod stft;
pub mod stream;

pub use audio::AudioClip;
pub use error::{CoreError, Result};
pub use frame::FrameSpec;
pub use mel::{MelFilterbank, MelSpectrogram};
pub use pcen::{MultiRateStack, PcenParams, RateSchedule};
pub use stream::SmootherState;
