//! Waveform-domain data augmentation: convolution reverb, synthetic room
//! impulse responses, phase-vocoder pitch shifting, and Brownian background
//! noise.
//!
//! All stochastic generators are seeded and reproducible across platforms.
//! Augmented clips keep the length and peak level of their source so that
//! downstream feature extraction sees comparable energy scales.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::audio::AudioClip;
use crate::error::{CoreError, Result};
use crate::stft::hann_window;

/// A room impulse response: the system a clip is convolved with to simulate
/// reverberation.
#[derive(Debug, Clone)]
pub struct ImpulseResponse {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    /// Short tag used to derive augmented clip ids (environment name or
    /// decay-constant tag).
    pub label: String,
}

impl ImpulseResponse {
    pub fn new(samples: Vec<f64>, sample_rate: u32, label: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(CoreError::EmptyInput("impulse response has no samples".into()));
        }
        if sample_rate == 0 {
            return Err(CoreError::InvalidParam("sample_rate must be > 0".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(CoreError::NonFinite("impulse response must be finite".into()));
        }
        Ok(Self {
            samples,
            sample_rate,
            label: label.into(),
        })
    }
}

// ===== peak normalization =====

/// Scales `samples` so the largest absolute value equals `target` exactly.
/// Dividing by the peak first (giving an exact 1.0 at the peak) and then
/// multiplying by the target makes the final peak bit-exact. A zero buffer
/// is left untouched.
pub fn peak_normalize(samples: &mut [f64], target: f64) {
    let peak = samples.iter().fold(0.0f64, |a, &s| a.max(s.abs()));
    if peak == 0.0 {
        return;
    }
    for s in samples.iter_mut() {
        *s = (*s / peak) * target;
    }
}

// ===== convolution =====

/// Kernels at or below this length use direct time-domain convolution,
/// which is both faster and exact (no FFT rounding) for short kernels.
const DIRECT_CONV_MAX_KERNEL: usize = 64;

/// Full linear convolution, output length `x.len() + h.len() - 1`.
/// Dispatches to direct evaluation for short kernels and an FFT product
/// otherwise.
pub fn convolve_full(x: &[f64], h: &[f64]) -> Vec<f64> {
    if x.is_empty() || h.is_empty() {
        return Vec::new();
    }
    let (long, short) = if x.len() >= h.len() { (x, h) } else { (h, x) };
    if short.len() <= DIRECT_CONV_MAX_KERNEL {
        convolve_direct(long, short)
    } else {
        convolve_fft(x, h)
    }
}

fn convolve_direct(x: &[f64], h: &[f64]) -> Vec<f64> {
    let n = x.len() + h.len() - 1;
    let mut out = vec![0.0; n];
    for (j, &hv) in h.iter().enumerate() {
        if hv == 0.0 {
            continue;
        }
        for (i, &xv) in x.iter().enumerate() {
            out[i + j] += xv * hv;
        }
    }
    out
}

fn convolve_fft(x: &[f64], h: &[f64]) -> Vec<f64> {
    let out_len = x.len() + h.len() - 1;
    let size = out_len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);

    let mut xa: Vec<Complex<f64>> = x
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::default()))
        .take(size)
        .collect();
    let mut ha: Vec<Complex<f64>> = h
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::default()))
        .take(size)
        .collect();
    fft.process(&mut xa);
    fft.process(&mut ha);
    for (a, b) in xa.iter_mut().zip(&ha) {
        *a *= b;
    }
    ifft.process(&mut xa);
    let scale = 1.0 / size as f64;
    xa.truncate(out_len);
    xa.into_iter().map(|c| c.re * scale).collect()
}

/// Convolves a clip with an impulse response, truncates back to the clip's
/// length, and restores the clip's original peak level.
///
/// Sample rates must match; no resampling is performed.
pub fn convolve_reverb(clip: &AudioClip, ir: &ImpulseResponse) -> Result<AudioClip> {
    if ir.sample_rate != clip.sample_rate() {
        return Err(CoreError::SampleRateMismatch {
            expected: clip.sample_rate(),
            actual: ir.sample_rate,
        });
    }
    let mut wet = convolve_full(clip.samples(), &ir.samples);
    wet.truncate(clip.len());

    let in_peak = clip.peak();
    let out_peak = wet.iter().fold(0.0f64, |a, &s| a.max(s.abs()));
    if in_peak > 0.0 && out_peak > 0.0 && in_peak != out_peak {
        for s in wet.iter_mut() {
            *s = (*s / out_peak) * in_peak;
        }
    }
    AudioClip::new(wet, clip.sample_rate())
}

// ===== synthetic impulse responses =====

/// Synthesizes an exponentially decaying white-noise impulse response:
/// `w[n] * exp(-(n / sr) / tau_c)` with `w` standard normal. `tau_c` is the
/// decay constant in seconds; a duration of about `5 * tau_c` captures the
/// tail down to below 1% of its initial level.
pub fn synth_impulse_response(
    tau_c: f64,
    duration: f64,
    sample_rate: u32,
    seed: u64,
) -> Result<ImpulseResponse> {
    if !(tau_c > 0.0) || !tau_c.is_finite() {
        return Err(CoreError::InvalidParam(format!(
            "tau_c must be finite and > 0, got {tau_c}"
        )));
    }
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(CoreError::InvalidParam(format!(
            "duration must be finite and > 0, got {duration}"
        )));
    }
    if sample_rate == 0 {
        return Err(CoreError::InvalidParam("sample_rate must be > 0".into()));
    }
    let n = ((duration * sample_rate as f64).round() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let w: f64 = StandardNormal.sample(&mut rng);
            let t = i as f64 / sample_rate as f64;
            w * (-t / tau_c).exp()
        })
        .collect();
    ImpulseResponse::new(samples, sample_rate, format!("tau{tau_c}"))
}

// ===== pitch shifting =====

/// Analysis geometry of the phase vocoder.
const PV_WINDOW: usize = 1024;
const PV_HOP: usize = 256;

/// Shifts pitch by `semitones` (positive = up) without changing duration.
///
/// Implemented as a phase-vocoder time stretch by `2^(semitones/12)`
/// followed by windowed-sinc resampling at the inverse factor, so the output
/// has exactly the input's length. Shifts beyond one octave either way are
/// rejected.
pub fn pitch_shift(clip: &AudioClip, semitones: f64) -> Result<AudioClip> {
    if !semitones.is_finite() || semitones.abs() > 12.0 {
        return Err(CoreError::InvalidParam(format!(
            "semitones must lie in [-12, 12], got {semitones}"
        )));
    }
    let ratio = 2f64.powf(semitones / 12.0);
    let stretched = time_stretch(clip.samples(), ratio);
    let out = resample(&stretched, ratio, clip.len());
    AudioClip::new(out, clip.sample_rate())
}

/// Phase-vocoder time stretch: output duration is `factor` times the input
/// duration, pitch unchanged. Magnitudes are linearly interpolated between
/// analysis frames; phases advance by the measured per-bin instantaneous
/// frequency.
fn time_stretch(samples: &[f64], factor: f64) -> Vec<f64> {
    let spectrum = crate::stft::stft_complex(samples, PV_WINDOW, PV_HOP);
    let (n_bins, n_frames) = spectrum.dim();
    if n_frames < 2 {
        return samples.to_vec();
    }

    // Output frame k reads (fractional) input frame position k / factor.
    let out_frames = ((n_frames - 1) as f64 * factor).floor() as usize + 1;

    // Expected phase advance per analysis hop for each bin.
    let expected: Vec<f64> = (0..n_bins)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 * PV_HOP as f64 / PV_WINDOW as f64)
        .collect();

    let mut phase: Vec<f64> = (0..n_bins).map(|k| spectrum[(k, 0)].arg()).collect();
    let mut columns: Vec<Vec<Complex<f64>>> = Vec::with_capacity(out_frames);

    let two_pi = 2.0 * std::f64::consts::PI;
    for k_out in 0..out_frames {
        let pos = k_out as f64 / factor;
        let i0 = (pos.floor() as usize).min(n_frames - 2);
        let frac = pos - i0 as f64;

        let mut col = Vec::with_capacity(n_bins);
        for k in 0..n_bins {
            let a = spectrum[(k, i0)];
            let b = spectrum[(k, i0 + 1)];
            let mag = (1.0 - frac) * a.norm() + frac * b.norm();

            // Emit with the phase accumulated so far, then advance it for
            // the next frame: the deviation of the measured advance from the
            // bin center, wrapped to (-pi, pi], is the instantaneous
            // frequency offset. At unit factor this telescopes to the input
            // phases exactly, so the stretch passes a signal through intact.
            col.push(Complex::from_polar(mag, phase[k]));
            let mut dphi = b.arg() - a.arg() - expected[k];
            dphi -= two_pi * (dphi / two_pi).round();
            phase[k] += expected[k] + dphi;
        }
        columns.push(col);
    }

    overlap_add(&columns, n_bins)
}

/// Inverse STFT by windowed overlap-add, normalizing by the accumulated
/// squared window. Frame k is centered at output position `k * hop`.
fn overlap_add(columns: &[Vec<Complex<f64>>], n_bins: usize) -> Vec<f64> {
    let out_frames = columns.len();
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(PV_WINDOW);
    let window = hann_window(PV_WINDOW);

    let buf_len = (out_frames - 1) * PV_HOP + PV_WINDOW;
    let mut acc = vec![0.0; buf_len];
    let mut wsum = vec![0.0; buf_len];
    let mut spec = vec![Complex::default(); PV_WINDOW];
    let mut scratch = vec![Complex::default(); ifft.get_inplace_scratch_len()];

    for (k_out, col) in columns.iter().enumerate() {
        // Rebuild the full conjugate-symmetric spectrum.
        spec[..n_bins].copy_from_slice(col);
        for k in 1..PV_WINDOW - n_bins + 1 {
            spec[PV_WINDOW - k] = col[k].conj();
        }
        ifft.process_with_scratch(&mut spec, &mut scratch);
        let offset = k_out * PV_HOP;
        let scale = 1.0 / PV_WINDOW as f64;
        for i in 0..PV_WINDOW {
            let v = spec[i].re * scale;
            acc[offset + i] += v * window[i];
            wsum[offset + i] += window[i] * window[i];
        }
    }

    // The analysis frames were centered, so sample i of the signal lives at
    // buffer index i + window/2.
    let start = PV_WINDOW / 2;
    let len = (out_frames - 1) * PV_HOP + 1;
    (0..len)
        .map(|i| {
            let w = wsum[start + i];
            if w > 1e-8 {
                acc[start + i] / w
            } else {
                0.0
            }
        })
        .collect()
}

/// Width of the sinc interpolation kernel, in output-rate zero crossings.
const RESAMPLE_HALF_WIDTH: f64 = 32.0;

/// Reads `input` at positions `i * step` for `i` in `0..target_len`,
/// interpolating with a Hann-windowed sinc. When `step > 1` (decimation)
/// the kernel cutoff is lowered to `1/step` of Nyquist for anti-aliasing.
fn resample(input: &[f64], step: f64, target_len: usize) -> Vec<f64> {
    let cutoff = (1.0 / step).min(1.0);
    let half_width = RESAMPLE_HALF_WIDTH / cutoff;
    let n = input.len() as isize;

    (0..target_len)
        .map(|i| {
            let pos = i as f64 * step;
            let lo = (pos - half_width).ceil() as isize;
            let hi = (pos + half_width).floor() as isize;
            let mut acc = 0.0;
            for j in lo.max(0)..=hi.min(n - 1) {
                let u = (pos - j as f64) * cutoff;
                let sinc = if u == 0.0 {
                    1.0
                } else {
                    let pu = std::f64::consts::PI * u;
                    pu.sin() / pu
                };
                // Hann taper over the kernel support.
                let taper = 0.5 + 0.5 * (std::f64::consts::PI * u / RESAMPLE_HALF_WIDTH).cos();
                acc += input[j as usize] * cutoff * sinc * taper;
            }
            acc
        })
        .collect()
}

// ===== background noise =====

/// Brownian (random-walk) noise: cumulative sum of seeded white Gaussian
/// noise, mean-removed, peak-normalized to 0.9. Its power spectrum falls at
/// about 20 dB per decade, concentrating energy at low frequencies.
pub fn brown_noise(duration: f64, sample_rate: u32, seed: u64) -> Result<AudioClip> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(CoreError::InvalidParam(format!(
            "duration must be finite and > 0, got {duration}"
        )));
    }
    if sample_rate == 0 {
        return Err(CoreError::InvalidParam("sample_rate must be > 0".into()));
    }
    let n = ((duration * sample_rate as f64).round() as usize).max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n);
    let mut acc = 0.0;
    for _ in 0..n {
        let w: f64 = StandardNormal.sample(&mut rng);
        acc += w;
        samples.push(acc);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    for s in samples.iter_mut() {
        *s -= mean;
    }
    peak_normalize(&mut samples, 0.9);
    AudioClip::new(samples, sample_rate)
}
