//! Mel-frequency filterbank and log compression.
//!
//! The mel scale is linear below 1 kHz and logarithmic above. Filters are
//! triangles between adjacent mel-spaced edge frequencies, evaluated at the
//! STFT bin centers and area-normalized: each triangle is scaled by
//! `2 / (upper_edge - lower_edge)` so its continuous area is 1 and wide
//! high-frequency filters do not dominate narrow low-frequency ones.

use ndarray::Array2;
use std::ops::Range;

use crate::audio::AudioClip;
use crate::error::{CoreError, Result};
use crate::frame::FrameSpec;
use crate::stft::stft_magnitude;

/// Breakpoint between the linear and logarithmic regions, Hz.
const BREAK_HZ: f64 = 1000.0;
/// Mels per Hz in the linear region (1000 Hz spans 15 mels).
const LINEAR_MELS_PER_HZ: f64 = 3.0 / 200.0;
/// Mel value at the breakpoint.
const BREAK_MEL: f64 = 15.0;

fn log_step() -> f64 {
    // Each further factor of 6.4 in frequency spans 27 mels.
    6.4f64.ln() / 27.0
}

/// Hz to mel: linear below 1 kHz, logarithmic above.
pub fn hz_to_mel(hz: f64) -> f64 {
    if hz < BREAK_HZ {
        hz * LINEAR_MELS_PER_HZ
    } else {
        BREAK_MEL + (hz / BREAK_HZ).ln() / log_step()
    }
}

/// Inverse of [`hz_to_mel`].
pub fn mel_to_hz(mel: f64) -> f64 {
    if mel < BREAK_MEL {
        mel / LINEAR_MELS_PER_HZ
    } else {
        BREAK_HZ * (log_step() * (mel - BREAK_MEL)).exp()
    }
}

/// Triangular mel filterbank sampled at STFT bin centers.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    weights: Array2<f64>,
    /// Per-filter contiguous range of bins with nonzero weight.
    support: Vec<Range<usize>>,
    /// `n_mels + 2` edge frequencies in Hz (lower edge of filter 0 through
    /// upper edge of the last filter).
    edges_hz: Vec<f64>,
}

impl MelFilterbank {
    /// `[n_mels, n_bins]` weight matrix.
    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    /// Edge frequencies in Hz; filter `m` spans `edges_hz[m]..edges_hz[m+2]`
    /// with its peak at `edges_hz[m+1]`.
    pub fn edges_hz(&self) -> &[f64] {
        &self.edges_hz
    }

    /// Bin range with nonzero weight for filter `m`.
    pub fn support(&self, m: usize) -> Range<usize> {
        self.support[m].clone()
    }

    /// Projects a `[n_bins, n_frames]` spectrogram onto the mel axis,
    /// producing `[n_mels, n_frames]`. Only the nonzero support of each
    /// filter is visited.
    pub fn apply(&self, spectrogram: &Array2<f64>) -> Result<Array2<f64>> {
        let (n_bins, n_frames) = spectrogram.dim();
        if n_bins != self.weights.ncols() {
            return Err(CoreError::DimensionMismatch(format!(
                "spectrogram has {n_bins} bins but filterbank expects {}",
                self.weights.ncols()
            )));
        }
        let n_mels = self.weights.nrows();
        let mut out = Array2::zeros((n_mels, n_frames));
        for m in 0..n_mels {
            let range = self.support[m].clone();
            let row = self.weights.row(m);
            for t in 0..n_frames {
                let mut acc = 0.0;
                for k in range.clone() {
                    acc += row[k] * spectrogram[(k, t)];
                }
                out[(m, t)] = acc;
            }
        }
        Ok(out)
    }
}

/// Builds the triangular filterbank for a frame spec.
///
/// A filter row may end up with no nonzero bins only when `n_mels` outstrips
/// the bin resolution; that is permitted but logged as a warning because the
/// corresponding band will read as constant zero downstream.
pub fn mel_filterbank(spec: &FrameSpec) -> Result<MelFilterbank> {
    let n_bins = spec.n_bins();
    let n_mels = spec.n_mels;

    let mel_lo = hz_to_mel(spec.fmin);
    let mel_hi = hz_to_mel(spec.fmax);
    let edges_hz: Vec<f64> = (0..n_mels + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (n_mels + 1) as f64))
        .collect();

    let bin_hz: Vec<f64> = (0..n_bins)
        .map(|k| k as f64 * spec.sample_rate as f64 / spec.window_length as f64)
        .collect();

    let mut weights = Array2::zeros((n_mels, n_bins));
    let mut support = Vec::with_capacity(n_mels);
    for m in 0..n_mels {
        let (lo, ctr, hi) = (edges_hz[m], edges_hz[m + 1], edges_hz[m + 2]);
        let norm = 2.0 / (hi - lo);
        let mut first = n_bins;
        let mut last = 0;
        for (k, &f) in bin_hz.iter().enumerate() {
            let rising = if ctr > lo { (f - lo) / (ctr - lo) } else { -1.0 };
            let falling = if hi > ctr { (hi - f) / (hi - ctr) } else { -1.0 };
            let w = rising.min(falling).max(0.0) * norm;
            if w > 0.0 {
                weights[(m, k)] = w;
                first = first.min(k);
                last = k;
            }
        }
        if first == n_bins {
            log::warn!(
                "mel filter {m} ({:.1}..{:.1} Hz) has no nonzero bins at this resolution",
                lo,
                hi
            );
            support.push(0..0);
        } else {
            support.push(first..last + 1);
        }
    }

    Ok(MelFilterbank {
        weights,
        support,
        edges_hz,
    })
}

/// A mel-band magnitude spectrogram with its originating geometry.
#[derive(Debug, Clone)]
pub struct MelSpectrogram {
    values: Array2<f64>,
    spec: FrameSpec,
}

impl MelSpectrogram {
    /// Wraps an existing `[n_mels, n_frames]` matrix. Values must be finite
    /// and non-negative and the row count must match `spec.n_mels`.
    pub fn from_values(values: Array2<f64>, spec: FrameSpec) -> Result<Self> {
        if values.nrows() != spec.n_mels {
            return Err(CoreError::DimensionMismatch(format!(
                "matrix has {} rows but spec.n_mels is {}",
                values.nrows(),
                spec.n_mels
            )));
        }
        if values.ncols() == 0 {
            return Err(CoreError::EmptyInput("mel spectrogram has no frames".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(CoreError::NonFinite(
                "mel spectrogram values must be finite and non-negative".into(),
            ));
        }
        Ok(Self { values, spec })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn spec(&self) -> &FrameSpec {
        &self.spec
    }

    pub fn n_mels(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_frames(&self) -> usize {
        self.values.ncols()
    }

    /// Frames per second.
    pub fn frame_rate(&self) -> f64 {
        self.spec.frame_rate()
    }
}

/// Full front end: magnitude STFT followed by mel projection.
pub fn mel_spectrogram(clip: &AudioClip, spec: &FrameSpec) -> Result<MelSpectrogram> {
    let bank = mel_filterbank(spec)?;
    let mag = stft_magnitude(clip, spec)?;
    let values = bank.apply(&mag)?;
    MelSpectrogram::from_values(values, *spec)
}

/// Smallest value admitted into the logarithm.
pub const LOG_AMIN: f64 = 1e-10;
/// Default dynamic-range floor below the matrix maximum, dB.
pub const DEFAULT_TOP_DB: f64 = 80.0;

/// Converts a non-negative matrix to decibels relative to its maximum:
/// `10 * log10(max(v, 1e-10))`, referenced to the matrix max, then floored
/// `top_db` below the new maximum. The output maximum is always 0.
pub fn log_compress(values: &Array2<f64>, top_db: f64) -> Result<Array2<f64>> {
    if !(top_db > 0.0) {
        return Err(CoreError::InvalidParam(format!(
            "top_db must be > 0, got {top_db}"
        )));
    }
    if values.is_empty() {
        return Err(CoreError::EmptyInput("log_compress on empty matrix".into()));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(CoreError::NonFinite(
            "log_compress input must be finite and non-negative".into(),
        ));
    }
    let peak = values.iter().fold(0.0f64, |a, &v| a.max(v));
    let ref_db = 10.0 * peak.max(LOG_AMIN).log10();
    let mut out = values.mapv(|v| 10.0 * v.max(LOG_AMIN).log10() - ref_db);
    let max_db = out.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
    out.mapv_inplace(|v| v.max(max_db - top_db));
    Ok(out)
}
