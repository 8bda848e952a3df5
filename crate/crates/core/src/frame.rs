//! Framing geometry shared by every stage of the feature pipeline.

use crate::error::{CoreError, Result};

/// Analysis geometry: sample rate, STFT window/hop, and mel-axis layout.
///
/// A single `FrameSpec` travels with every derived artifact so that frame
/// counts, frame rate, and band layout stay consistent end to end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSpec {
    pub sample_rate: u32,
    pub window_length: usize,
    pub hop_length: usize,
    pub n_mels: usize,
    /// Lower edge of the mel filterbank, Hz.
    pub fmin: f64,
    /// Upper edge of the mel filterbank, Hz.
    pub fmax: f64,
}

impl FrameSpec {
    /// Validates and builds a spec.
    pub fn new(
        sample_rate: u32,
        window_length: usize,
        hop_length: usize,
        n_mels: usize,
        fmin: f64,
        fmax: f64,
    ) -> Result<Self> {
        if sample_rate == 0 {
            return Err(CoreError::InvalidParam("sample_rate must be > 0".into()));
        }
        if window_length == 0 {
            return Err(CoreError::InvalidParam("window_length must be > 0".into()));
        }
        if hop_length == 0 || hop_length > window_length {
            return Err(CoreError::InvalidParam(format!(
                "hop_length must satisfy 0 < hop <= window ({hop_length} vs {window_length})"
            )));
        }
        if n_mels == 0 {
            return Err(CoreError::InvalidParam("n_mels must be >= 1".into()));
        }
        let nyquist = sample_rate as f64 / 2.0;
        if !(fmin >= 0.0 && fmin < fmax && fmax <= nyquist) {
            return Err(CoreError::InvalidParam(format!(
                "mel range must satisfy 0 <= fmin < fmax <= {nyquist} (got {fmin}..{fmax})"
            )));
        }
        Ok(Self {
            sample_rate,
            window_length,
            hop_length,
            n_mels,
            fmin,
            fmax,
        })
    }

    /// The standard 44.1 kHz analysis setup: 1024-sample window, 512-sample
    /// hop, 128 mel bands spanning 0 Hz to Nyquist.
    pub fn default_44k() -> Self {
        Self {
            sample_rate: 44_100,
            window_length: 1024,
            hop_length: 512,
            n_mels: 128,
            fmin: 0.0,
            fmax: 22_050.0,
        }
    }

    /// Number of STFT frames produced for a clip of `n_samples` samples:
    /// `1 + floor(n_samples / hop)`. Centered framing means even a one-sample
    /// clip yields one frame.
    pub fn n_frames(&self, n_samples: usize) -> usize {
        1 + n_samples / self.hop_length
    }

    /// Number of frequency bins per frame: `window/2 + 1`.
    pub fn n_bins(&self) -> usize {
        self.window_length / 2 + 1
    }

    /// Frames per second: `sample_rate / hop`.
    pub fn frame_rate(&self) -> f64 {
        self.sample_rate as f64 / self.hop_length as f64
    }
}

impl Default for FrameSpec {
    fn default() -> Self {
        Self::default_44k()
    }
}
