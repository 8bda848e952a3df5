//! Frame-at-a-time PCEN for online use.
//!
//! The streaming path reuses the exact scalar kernels of the batch path, so
//! feeding a spectrogram column by column reproduces the batch output bit
//! for bit. State is plain owned data: it can move between threads, but a
//! single smoother must never be driven from two places at once.

use crate::error::{CoreError, Result};
use crate::pcen::{pcen_kernel, smoother_update, PcenParams};

/// Running smoothed-energy state for one PCEN layer.
///
/// Until the first frame arrives the state is uninitialized; the first frame
/// becomes the initial smoother value, matching the batch convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SmootherState {
    smoothed: Vec<f64>,
    primed: bool,
}

impl SmootherState {
    /// State for `n_bands` frequency bands.
    pub fn new(n_bands: usize) -> Result<Self> {
        if n_bands == 0 {
            return Err(CoreError::InvalidParam(
                "smoother needs at least one band".into(),
            ));
        }
        Ok(Self {
            smoothed: vec![0.0; n_bands],
            primed: false,
        })
    }

    pub fn n_bands(&self) -> usize {
        self.smoothed.len()
    }

    /// Current smoothed energies, or `None` before the first frame.
    pub fn smoothed(&self) -> Option<&[f64]> {
        self.primed.then_some(self.smoothed.as_slice())
    }

    /// Forgets all history; the next frame re-primes the smoother.
    pub fn reset(&mut self) {
        self.primed = false;
    }
}

/// Processes one spectrogram frame (a column of per-band energies), updating
/// the smoother in place and returning the normalized frame.
pub fn pcen_stream_step(
    frame: &[f64],
    state: &mut SmootherState,
    params: &PcenParams,
) -> Result<Vec<f64>> {
    if frame.len() != state.smoothed.len() {
        return Err(CoreError::DimensionMismatch(format!(
            "frame has {} bands but state holds {}",
            frame.len(),
            state.smoothed.len()
        )));
    }
    if let Some(i) = frame.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(CoreError::NonFinite(format!(
            "band {i} is negative or not finite"
        )));
    }
    if params.eps() == 0.0 && frame.iter().any(|&v| v == 0.0) {
        return Err(CoreError::InvalidParam(
            "eps = 0 requires strictly positive input energies".into(),
        ));
    }

    let s = params.smoothing();
    let mut out = Vec::with_capacity(frame.len());
    if state.primed {
        for (m, &e) in state.smoothed.iter_mut().zip(frame) {
            *m = smoother_update(s, e, *m);
            out.push(pcen_kernel(e, *m, params));
        }
    } else {
        for (m, &e) in state.smoothed.iter_mut().zip(frame) {
            *m = e;
            out.push(pcen_kernel(e, *m, params));
        }
        state.primed = true;
    }
    Ok(out)
}
