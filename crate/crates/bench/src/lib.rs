//! Shared fixtures for the pipeline benchmarks: a deterministic reference
//! clip and its mel energy, sized like the workload the throughput numbers
//! are quoted against (10 s of 44.1 kHz audio at the default analysis
//! settings).

use mrpcen_core::audio::AudioClip;
use mrpcen_core::augment::brown_noise;
use mrpcen_core::frame::FrameSpec;
use mrpcen_core::mel::{mel_spectrogram, MelSpectrogram};
use std::f64::consts::PI;

/// Ten seconds of two tones over a bed of seeded Brownian noise.
pub fn reference_clip() -> AudioClip {
    let sr = 44_100u32;
    let noise = brown_noise(10.0, sr, 7).expect("valid noise params");
    let samples: Vec<f64> = noise
        .samples()
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let t = i as f64 / f64::from(sr);
            0.3 * (2.0 * PI * 440.0 * t).sin() + 0.1 * (2.0 * PI * 3000.0 * t).sin() + 0.05 * n
        })
        .collect();
    AudioClip::new(samples, sr).expect("valid clip")
}

/// Mel energy of the reference clip at the default analysis settings.
pub fn reference_energy() -> MelSpectrogram {
    mel_spectrogram(&reference_clip(), &FrameSpec::default_44k()).expect("valid front end")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_the_reference_shape() {
        let energy = reference_energy();
        assert_eq!(energy.n_mels(), 128);
        assert_eq!(energy.n_frames(), 862);
    }
}
