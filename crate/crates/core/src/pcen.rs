//! Per-channel energy normalization (PCEN) and its multi-rate extension.
//!
//! Each frequency band is divided by a causal AR(1)-smoothed version of its
//! own recent energy, then compressed:
//!
//! ```text
//! out(t, f) = (E(t, f) / (eps + M(t, f))^gain + bias)^power - bias^power
//! M(t, f)   = s * E(t, f) + (1 - s) * M(t - 1, f),   M(0, f) = E(0, f)
//! ```
//!
//! The smoother weight `s` is derived from a *rate* `T`, expressed in frames:
//! the half-power cutoff of the smoother is placed at `2 pi / T` radians per
//! frame (clamped to pi for `T < 2`). A multi-rate stack applies the same
//! normalization at several rates at once, so slow and fast energy contours
//! are represented side by side.

use ndarray::{s, Array2, Array3};

use crate::error::{CoreError, Result};
use crate::frame::FrameSpec;
use crate::mel::MelSpectrogram;

// ===== rate -> smoother weight =====

/// Nominal angular cutoff for a rate of `T` frames: `min(2 pi / T, pi)`.
/// Rates below 2 frames would place the cutoff past the principal domain,
/// so they saturate at pi. Rates below 1 frame are rejected.
pub fn cutoff_frequency(rate: f64) -> Result<f64> {
    if !(rate >= 1.0) || !rate.is_finite() {
        return Err(CoreError::InvalidParam(format!(
            "rate must be a finite number of frames >= 1, got {rate}"
        )));
    }
    Ok((2.0 * std::f64::consts::PI / rate).min(std::f64::consts::PI))
}

/// AR(1) smoother weight whose half-power cutoff sits at the nominal cutoff
/// for `rate`.
///
/// Setting `|H(w)|^2 = 1/2` for `H(w) = s / (1 - (1-s) e^{-jw})` gives
/// `cos(w) = 1 - s^2 / (2 (1 - s))`; solving for `s` at `w = min(2 pi/rate, pi)`
/// with `q = 1 - cos(w)` yields the positive root of `s^2 + 2 q s - 2 q = 0`:
/// `s = sqrt(q^2 + 2 q) - q`. The result is strictly decreasing in `rate`
/// and lies in `(0, 2 sqrt(2) - 2]`.
pub fn smoothing_coefficient(rate: f64) -> Result<f64> {
    let omega = cutoff_frequency(rate)?;
    let q = 1.0 - omega.cos();
    Ok((q * q + 2.0 * q).sqrt() - q)
}

/// Magnitude response of the unity-DC-gain AR(1) smoother at angular
/// frequency `omega` (radians per frame).
pub fn ar1_magnitude_response(smoothing: f64, omega: f64) -> f64 {
    let r = 1.0 - smoothing;
    let denom_sq = 1.0 + r * r - 2.0 * r * omega.cos();
    smoothing / denom_sq.sqrt()
}

/// Numerically locates the half-power point of the smoother: the `omega`
/// where `|H|^2 = 1/2`, found by bisection on the monotone response.
pub fn measured_cutoff_frequency(smoothing: f64) -> f64 {
    let target = 0.5f64.sqrt();
    let (mut lo, mut hi) = (0.0, std::f64::consts::PI);
    // |H| decreases monotonically on (0, pi]; 60 halvings reach ~1e-18.
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ar1_magnitude_response(smoothing, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// ===== parameters =====

/// Parameters of the normalize-and-compress map, plus the smoother rate.
///
/// Field roles: `eps` keeps the denominator away from zero, `gain` is the
/// exponent on the smoothed energy (1 = full normalization, 0 = none),
/// `bias` and `power` shape the root compression, and `rate` is the smoother
/// time scale in frames. The smoother weight is derived from `rate` at
/// construction and cannot be set independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcenParams {
    eps: f64,
    gain: f64,
    bias: f64,
    power: f64,
    rate: f64,
    smoothing: f64,
}

impl PcenParams {
    /// Standard parameter values used throughout: `eps = 1e-6`,
    /// `gain = 0.98`, `bias = 2`, `power = 0.5`.
    pub const DEFAULT_EPS: f64 = 1e-6;
    pub const DEFAULT_GAIN: f64 = 0.98;
    pub const DEFAULT_BIAS: f64 = 2.0;
    pub const DEFAULT_POWER: f64 = 0.5;

    /// Validates and builds a parameter set.
    ///
    /// `eps = 0` is accepted as a limiting case (it makes the transform
    /// exactly scale-invariant at `gain = 1`) but then the input must be
    /// strictly positive. `power = 0` is rejected: it collapses the output
    /// to identically zero. `gain = 0` and `power = 1` are legal limiting
    /// cases.
    pub fn new(eps: f64, gain: f64, bias: f64, power: f64, rate: f64) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(CoreError::InvalidParam(format!(
                "eps must be finite and >= 0, got {eps}"
            )));
        }
        if !(gain >= 0.0) || !gain.is_finite() {
            return Err(CoreError::InvalidParam(format!(
                "gain must be finite and >= 0, got {gain}"
            )));
        }
        if !(bias >= 0.0) || !bias.is_finite() {
            return Err(CoreError::InvalidParam(format!(
                "bias must be finite and >= 0, got {bias}"
            )));
        }
        if !(power > 0.0) || !power.is_finite() {
            return Err(CoreError::InvalidParam(format!(
                "power must be finite and > 0 (0 would erase the signal), got {power}"
            )));
        }
        let smoothing = smoothing_coefficient(rate)?;
        Ok(Self {
            eps,
            gain,
            bias,
            power,
            rate,
            smoothing,
        })
    }

    /// Standard parameters at the given smoother rate (in frames).
    pub fn with_rate(rate: f64) -> Result<Self> {
        Self::new(
            Self::DEFAULT_EPS,
            Self::DEFAULT_GAIN,
            Self::DEFAULT_BIAS,
            Self::DEFAULT_POWER,
            rate,
        )
    }

    /// Same normalization/compression constants, different rate.
    pub fn at_rate(&self, rate: f64) -> Result<Self> {
        Self::new(self.eps, self.gain, self.bias, self.power, rate)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// Smoother time scale in frames.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Derived smoother weight `s`.
    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    /// True when the nominal cutoff `2 pi / rate` exceeded pi and was
    /// clamped (rates below 2 frames).
    pub fn cutoff_clamped(&self) -> bool {
        self.rate < 2.0
    }
}

// ===== kernels shared by batch and streaming paths =====

/// One smoother update: `s * e + (1 - s) * m_prev`. Batch and streaming use
/// this same expression so their outputs agree bit for bit.
#[inline]
pub(crate) fn smoother_update(smoothing: f64, energy: f64, m_prev: f64) -> f64 {
    smoothing * energy + (1.0 - smoothing) * m_prev
}

/// The elementwise normalize-and-compress map, given the smoothed energy for
/// the same cell.
#[inline]
pub fn pcen_kernel(energy: f64, smoothed: f64, params: &PcenParams) -> f64 {
    let normalized = energy / (params.eps + smoothed).powf(params.gain);
    (normalized + params.bias).powf(params.power) - params.bias.powf(params.power)
}

// ===== batch transforms =====

/// Causal AR(1) smoothing along the frame axis, initialized with the first
/// frame. Output shape equals the input shape.
pub fn ar1_smooth(energy: &MelSpectrogram, smoothing: f64) -> Result<Array2<f64>> {
    if !(smoothing > 0.0 && smoothing <= 1.0) {
        return Err(CoreError::InvalidParam(format!(
            "smoothing weight must lie in (0, 1], got {smoothing}"
        )));
    }
    let e = energy.values();
    let (n_mels, n_frames) = e.dim();
    let mut m = Array2::zeros((n_mels, n_frames));
    for band in 0..n_mels {
        let mut prev = e[(band, 0)];
        m[(band, 0)] = prev;
        for t in 1..n_frames {
            prev = smoother_update(smoothing, e[(band, t)], prev);
            m[(band, t)] = prev;
        }
    }
    Ok(m)
}

/// Per-channel energy normalization of a mel spectrogram at a single rate.
pub fn pcen_transform(energy: &MelSpectrogram, params: &PcenParams) -> Result<Array2<f64>> {
    if params.eps == 0.0 && energy.values().iter().any(|&v| v == 0.0) {
        return Err(CoreError::InvalidParam(
            "eps = 0 requires strictly positive input energies".into(),
        ));
    }
    let m = ar1_smooth(energy, params.smoothing)?;
    let e = energy.values();
    let mut out = Array2::zeros(e.dim());
    for ((idx, &ev), &mv) in e.indexed_iter().zip(m.iter()) {
        out[idx] = pcen_kernel(ev, mv, params);
    }
    Ok(out)
}

// ===== rate schedules and multi-rate stacks =====

/// A strictly increasing list of smoother rates (in frames), one per layer
/// of a multi-rate stack.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSchedule {
    rates: Vec<f64>,
}

impl RateSchedule {
    /// Validates a schedule: non-empty, all rates finite and >= 1, strictly
    /// increasing.
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(CoreError::EmptyInput("rate schedule has no rates".into()));
        }
        for &r in &rates {
            if !(r >= 1.0) || !r.is_finite() {
                return Err(CoreError::InvalidParam(format!(
                    "rates must be finite and >= 1, got {r}"
                )));
            }
        }
        if rates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::InvalidParam(
                "rates must be strictly increasing".into(),
            ));
        }
        Ok(Self { rates })
    }

    /// The standard ten-layer octave schedule: `1, 2, 4, ..., 512` frames.
    pub fn octave_default() -> Self {
        Self {
            rates: (0..10).map(|k| f64::from(1u32 << k)).collect(),
        }
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    /// Every contiguous window of this schedule, shortest first: all
    /// singletons, then all pairs of adjacent rates, and so on up to the
    /// full schedule. Useful for sweeping which band of time scales matters.
    pub fn contiguous_windows(&self) -> Vec<RateSchedule> {
        let n = self.rates.len();
        let mut out = Vec::new();
        for width in 1..=n {
            for start in 0..=n - width {
                out.push(RateSchedule {
                    rates: self.rates[start..start + width].to_vec(),
                });
            }
        }
        out
    }
}

/// A stack of PCEN layers over a rate schedule: shape
/// `[n_mels, n_frames, n_rates]`, with layer `k` normalized at
/// `schedule.rates()[k]`.
#[derive(Debug, Clone)]
pub struct MultiRateStack {
    values: Array3<f64>,
    schedule: RateSchedule,
    params: PcenParams,
    spec: FrameSpec,
}

impl MultiRateStack {
    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn schedule(&self) -> &RateSchedule {
        &self.schedule
    }

    /// The shared normalization/compression constants (the per-layer rate
    /// comes from the schedule, not from these params).
    pub fn params(&self) -> &PcenParams {
        &self.params
    }

    pub fn spec(&self) -> &FrameSpec {
        &self.spec
    }

    pub fn n_mels(&self) -> usize {
        self.values.dim().0
    }

    pub fn n_frames(&self) -> usize {
        self.values.dim().1
    }

    pub fn n_rates(&self) -> usize {
        self.values.dim().2
    }

    /// Layer `k` as an `[n_mels, n_frames]` view.
    pub fn layer(&self, k: usize) -> ndarray::ArrayView2<'_, f64> {
        self.values.slice(s![.., .., k])
    }

    pub fn frame_rate(&self) -> f64 {
        self.spec.frame_rate()
    }
}

/// Applies PCEN at every rate of the schedule and stacks the results along a
/// third axis. The `rate` field of `params` is ignored; each layer uses the
/// corresponding schedule entry.
pub fn multi_rate_pcen(
    energy: &MelSpectrogram,
    schedule: &RateSchedule,
    params: &PcenParams,
) -> Result<MultiRateStack> {
    let (n_mels, n_frames) = energy.values().dim();
    let mut values = Array3::zeros((n_mels, n_frames, schedule.len()));
    for (k, &rate) in schedule.rates().iter().enumerate() {
        let layer = pcen_transform(energy, &params.at_rate(rate)?)?;
        values.slice_mut(s![.., .., k]).assign(&layer);
    }
    Ok(MultiRateStack {
        values,
        schedule: schedule.clone(),
        params: *params,
        spec: *energy.spec(),
    })
}
