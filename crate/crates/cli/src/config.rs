//! Pipeline configuration: a single JSON file covering framing, the
//! normalization parameters, the rate schedule, the representation choice,
//! and the augmentation/evaluation/detector settings.
//!
//! Every field has a default, so an empty object `{}` reproduces the
//! standard featurization (44.1 kHz, 1024/512 framing, 128 mel bands,
//! 10-rate stack). The featurization-relevant subset is hashed into a
//! `config_hash` that travels with every feature file; changing evaluation
//! or augmentation settings does not invalidate cached features.

use std::collections::BTreeMap;
use std::ops::Range;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use mrpcen_core::pcen::PcenParams;
use mrpcen_core::{FrameSpec, RateSchedule};

/// Which representation `featurize` writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// Log-compressed mel spectrogram, one layer.
    Logmel,
    /// Single-rate normalization at the first schedule rate, one layer.
    Pcen,
    /// The full multi-rate stack, one layer per schedule rate.
    Mrpcen,
}

/// One impulse response in the augmentation plan: either a measured WAV or
/// an exponentially decaying synthetic response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum IrSpec {
    Wav {
        path: PathBuf,
        label: String,
    },
    Synthetic {
        /// Decay time constant, seconds.
        tau_c: f64,
        /// Response length, seconds.
        duration: f64,
        seed: u64,
        /// Defaults to `tau{tau_c}`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

impl IrSpec {
    pub fn label(&self) -> String {
        match self {
            IrSpec::Wav { label, .. } => label.clone(),
            IrSpec::Synthetic { tau_c, label, .. } => label
                .clone()
                .unwrap_or_else(|| format!("tau{tau_c}")),
        }
    }
}

/// Augmentation plan: which reverbs and pitch shifts to apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub impulse_responses: Vec<IrSpec>,
    /// Shifts in semitones, e.g. `[-2, -1, 1, 2]`.
    pub pitch_shifts: Vec<f64>,
    /// Whether the output manifest also lists the unmodified clips.
    pub keep_originals: bool,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            impulse_responses: Vec::new(),
            pitch_shifts: Vec::new(),
            keep_originals: true,
        }
    }
}

/// Segment-metric and bootstrap settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Segment length in seconds.
    pub segment_length: f64,
    /// Clips drawn per bootstrap replicate.
    pub bootstrap_samples: usize,
    /// Number of bootstrap replicates.
    pub bootstrap_reps: usize,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            segment_length: 1.0,
            bootstrap_samples: 100,
            bootstrap_reps: 100,
            seed: 17,
        }
    }
}

/// Fixed-threshold detector settings: per-class half-open band ranges
/// `[lo, hi)` on the mel axis, and the activation threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub threshold: f64,
    pub band_ranges: BTreeMap<String, (usize, usize)>,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            threshold: 0.5,
            band_ranges: BTreeMap::new(),
        }
    }
}

impl DetectorConfig {
    pub fn ranges(&self) -> BTreeMap<String, Range<usize>> {
        self.band_ranges
            .iter()
            .map(|(k, &(lo, hi))| (k.clone(), lo..hi))
            .collect()
    }
}

/// The complete pipeline configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub sample_rate: u32,
    pub window_length: usize,
    pub hop_length: usize,
    pub n_mels: usize,
    /// Mel filterbank range, Hz. `fmax = 0` means the Nyquist frequency.
    pub fmin: f64,
    pub fmax: f64,

    /// Denominator floor of the normalization.
    pub eps: f64,
    /// Exponent on the smoothed energy (1 = full normalization).
    pub gain: f64,
    /// Compression bias.
    pub bias: f64,
    /// Compression root.
    pub power: f64,

    pub representation: Representation,
    /// Smoother rates in frames, one stack layer each under `mrpcen`.
    pub rates: Vec<f64>,
    /// Dynamic-range limit for `logmel`, dB.
    pub top_db: f64,

    pub augment: AugmentConfig,
    pub eval: EvalConfig,
    pub detector: DetectorConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let frame = FrameSpec::default_44k();
        Self {
            sample_rate: frame.sample_rate,
            window_length: frame.window_length,
            hop_length: frame.hop_length,
            n_mels: frame.n_mels,
            fmin: 0.0,
            fmax: 0.0,
            eps: PcenParams::DEFAULT_EPS,
            gain: PcenParams::DEFAULT_GAIN,
            bias: PcenParams::DEFAULT_BIAS,
            power: PcenParams::DEFAULT_POWER,
            representation: Representation::Mrpcen,
            rates: RateSchedule::octave_default().rates().to_vec(),
            top_db: mrpcen_core::mel::DEFAULT_TOP_DB,
            augment: AugmentConfig::default(),
            eval: EvalConfig::default(),
            detector: DetectorConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Reads a config file; a missing `path` of `None` yields the defaults.
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let config = match path {
            None => Self::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", p.display()))?
            }
        };
        config.validate()?;
        Ok(config)
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing config {}", path.display()))
    }

    /// Frame geometry implied by the config.
    pub fn frame_spec(&self) -> anyhow::Result<FrameSpec> {
        let fmax = if self.fmax == 0.0 {
            self.sample_rate as f64 / 2.0
        } else {
            self.fmax
        };
        Ok(FrameSpec::new(
            self.sample_rate,
            self.window_length,
            self.hop_length,
            self.n_mels,
            self.fmin,
            fmax,
        )?)
    }

    /// Normalization parameters at the first schedule rate.
    pub fn pcen_params(&self) -> anyhow::Result<PcenParams> {
        let first = *self.rates.first().context("rate schedule is empty")?;
        Ok(PcenParams::new(
            self.eps, self.gain, self.bias, self.power, first,
        )?)
    }

    pub fn schedule(&self) -> anyhow::Result<RateSchedule> {
        Ok(RateSchedule::new(self.rates.clone())?)
    }

    /// Checks every derived object constructs, so commands can fail fast.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.frame_spec().context("invalid framing")?;
        self.schedule().context("invalid rate schedule")?;
        self.pcen_params().context("invalid normalization parameters")?;
        if !(self.eval.segment_length > 0.0) {
            anyhow::bail!("eval.segment_length must be > 0");
        }
        if self.eval.bootstrap_samples == 0 || self.eval.bootstrap_reps == 0 {
            anyhow::bail!("eval.bootstrap_samples and eval.bootstrap_reps must be >= 1");
        }
        if !self.detector.threshold.is_finite() {
            anyhow::bail!("detector.threshold must be finite");
        }
        if !(self.top_db > 0.0) {
            anyhow::bail!("top_db must be > 0");
        }
        for spec in &self.augment.impulse_responses {
            if let IrSpec::Synthetic {
                tau_c, duration, ..
            } = spec
            {
                if !(*tau_c > 0.0) || !(*duration > 0.0) {
                    anyhow::bail!("synthetic impulse responses need tau_c > 0 and duration > 0");
                }
            }
        }
        for &shift in &self.augment.pitch_shifts {
            if !shift.is_finite() || shift.abs() > 12.0 || shift == 0.0 {
                anyhow::bail!("pitch shifts must be nonzero and within [-12, 12] semitones");
            }
        }
        Ok(())
    }

    /// Hex SHA-256 over the featurization-relevant fields. Two configs with
    /// equal hashes produce byte-identical feature files for the same audio.
    pub fn config_hash(&self) -> String {
        #[derive(Serialize)]
        struct Fingerprint<'a> {
            sample_rate: u32,
            window_length: usize,
            hop_length: usize,
            n_mels: usize,
            fmin: f64,
            fmax: f64,
            eps: f64,
            gain: f64,
            bias: f64,
            power: f64,
            representation: Representation,
            rates: &'a [f64],
            top_db: f64,
        }
        let fingerprint = Fingerprint {
            sample_rate: self.sample_rate,
            window_length: self.window_length,
            hop_length: self.hop_length,
            n_mels: self.n_mels,
            fmin: self.fmin,
            fmax: self.fmax,
            eps: self.eps,
            gain: self.gain,
            bias: self.bias,
            power: self.power,
            representation: self.representation,
            rates: &self.rates,
            top_db: self.top_db,
        };
        let canonical = serde_json::to_string(&fingerprint).expect("fingerprint serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_standard_defaults() {
        let c: PipelineConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, PipelineConfig::default());
        assert_eq!(c.sample_rate, 44_100);
        assert_eq!(c.window_length, 1024);
        assert_eq!(c.hop_length, 512);
        assert_eq!(c.n_mels, 128);
        assert_eq!(c.eps, 1e-6);
        assert_eq!(c.gain, 0.98);
        assert_eq!(c.bias, 2.0);
        assert_eq!(c.power, 0.5);
        assert_eq!(c.representation, Representation::Mrpcen);
        assert_eq!(
            c.rates,
            vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0]
        );
        assert!(c.augment.keep_originals);
        assert_eq!(c.eval.segment_length, 1.0);
        assert_eq!(c.eval.bootstrap_samples, 100);
        assert_eq!(c.eval.bootstrap_reps, 100);
        c.validate().unwrap();
    }

    #[test]
    fn roundtrips_through_json() {
        let mut c = PipelineConfig::default();
        c.representation = Representation::Logmel;
        c.augment.pitch_shifts = vec![-2.0, 2.0];
        c.augment.impulse_responses = vec![
            IrSpec::Synthetic {
                tau_c: 0.3,
                duration: 1.0,
                seed: 9,
                label: None,
            },
            IrSpec::Wav {
                path: PathBuf::from("irs/hall.wav"),
                label: "hall".into(),
            },
        ];
        c.detector.band_ranges.insert("tone".into(), (36, 45));
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: PipelineConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"gian": 0.5}"#).is_err());
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"eval": {"bogus": 1}}"#).is_err());
    }

    #[test]
    fn hash_ignores_non_featurization_fields() {
        let base = PipelineConfig::default();
        let mut eval_changed = base.clone();
        eval_changed.eval.seed = 999;
        eval_changed.detector.threshold = 0.9;
        eval_changed.augment.pitch_shifts = vec![1.0];
        assert_eq!(base.config_hash(), eval_changed.config_hash());

        let mut mels_changed = base.clone();
        mels_changed.n_mels = 64;
        assert_ne!(base.config_hash(), mels_changed.config_hash());

        let mut repr_changed = base.clone();
        repr_changed.representation = Representation::Logmel;
        assert_ne!(base.config_hash(), repr_changed.config_hash());

        assert_eq!(base.config_hash().len(), 64);
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut c = PipelineConfig::default();
        c.rates.clear();
        assert!(c.validate().is_err());

        let mut c = PipelineConfig::default();
        c.hop_length = 4096;
        assert!(c.validate().is_err());

        let mut c = PipelineConfig::default();
        c.augment.pitch_shifts = vec![13.0];
        assert!(c.validate().is_err());

        let mut c = PipelineConfig::default();
        c.augment.pitch_shifts = vec![0.0];
        assert!(c.validate().is_err());

        let mut c = PipelineConfig::default();
        c.eval.segment_length = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn synthetic_ir_label_defaults_to_tau_tag() {
        let ir = IrSpec::Synthetic {
            tau_c: 0.3,
            duration: 1.0,
            seed: 0,
            label: None,
        };
        assert_eq!(ir.label(), "tau0.3");
        let ir = IrSpec::Synthetic {
            tau_c: 0.3,
            duration: 1.0,
            seed: 0,
            label: Some("hallway".into()),
        };
        assert_eq!(ir.label(), "hallway");
    }

    #[test]
    fn fmax_zero_means_nyquist() {
        let c = PipelineConfig::default();
        assert_eq!(c.frame_spec().unwrap().fmax, 22_050.0);
        let mut c = PipelineConfig::default();
        c.fmax = 8000.0;
        assert_eq!(c.frame_spec().unwrap().fmax, 8000.0);
    }
}
