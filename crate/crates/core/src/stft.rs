//! Short-time Fourier transform with centered, reflect-padded framing.
//!
//! Frame `t` is centered on sample `t * hop`; the signal is mirrored (without
//! repeating the edge sample) to fill the half-window that hangs past each
//! end. A clip of `n` samples therefore yields exactly `1 + floor(n / hop)`
//! frames regardless of window length.

use ndarray::Array2;
use num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::AudioClip;
use crate::error::{CoreError, Result};
use crate::frame::FrameSpec;

/// Periodic Hann window: `w[n] = 0.5 - 0.5 cos(2 pi n / N)`.
pub fn hann_window(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos())
        .collect()
}

/// Maps a possibly out-of-range index onto `0..n` by mirror reflection
/// without edge repetition: `-1 -> 1`, `n -> n - 2`, and so on.
fn reflect_index(idx: isize, n: usize) -> usize {
    debug_assert!(n > 0);
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let mut p = idx.rem_euclid(period);
    if p >= n as isize {
        p = period - p;
    }
    p as usize
}

/// Gathers the window of samples centered on `center`, reflect-padding past
/// the signal edges.
fn gather_frame(samples: &[f64], center: usize, window_length: usize, out: &mut [f64]) {
    let half = window_length as isize / 2;
    let n = samples.len();
    for (i, slot) in out.iter_mut().enumerate() {
        let idx = center as isize - half + i as isize;
        *slot = samples[reflect_index(idx, n)];
    }
}

/// Complex STFT over arbitrary window/hop, shared by the magnitude front-end
/// and the phase vocoder. Rows are frequency bins (0..=window/2), columns are
/// frames.
pub(crate) fn stft_complex(
    samples: &[f64],
    window_length: usize,
    hop_length: usize,
) -> Array2<Complex<f64>> {
    let n_frames = 1 + samples.len() / hop_length;
    let n_bins = window_length / 2 + 1;
    let window = hann_window(window_length);

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(window_length);
    let mut buf = vec![Complex::default(); window_length];
    let mut scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
    let mut frame = vec![0.0; window_length];

    let mut out = Array2::default((n_bins, n_frames));
    for t in 0..n_frames {
        gather_frame(samples, t * hop_length, window_length, &mut frame);
        for (slot, (&x, &w)) in buf.iter_mut().zip(frame.iter().zip(&window)) {
            *slot = Complex::new(x * w, 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (k, col) in buf.iter().take(n_bins).enumerate() {
            out[(k, t)] = *col;
        }
    }
    out
}

/// Magnitude spectrogram of a clip: Hann-windowed, centered, reflect-padded
/// STFT with magnitude exponent 1. Shape is `[window/2 + 1, 1 + n/hop]`.
///
/// The window length must be a power of two and the clip's sample rate must
/// match the `FrameSpec` (no implicit resampling).
pub fn stft_magnitude(clip: &AudioClip, spec: &FrameSpec) -> Result<Array2<f64>> {
    if !spec.window_length.is_power_of_two() {
        return Err(CoreError::InvalidParam(format!(
            "window_length must be a power of two, got {}",
            spec.window_length
        )));
    }
    if clip.sample_rate() != spec.sample_rate {
        return Err(CoreError::SampleRateMismatch {
            expected: spec.sample_rate,
            actual: clip.sample_rate(),
        });
    }
    let complex = stft_complex(clip.samples(), spec.window_length, spec.hop_length);
    Ok(complex.mapv(|c| c.norm()))
}
