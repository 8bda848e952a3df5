//! Single-clip featurization and feature-file layout.
//!
//! Every representation is written as a rank-3 NPY tensor
//! `(n_mels, n_frames, n_layers)` — single-layer representations keep a
//! trailing axis of 1 so downstream readers handle one shape. Next to each
//! `{clip_id}.npy` sits a `{clip_id}.json` sidecar recording the clip id,
//! the featurization config hash, the rate schedule, and the frame rate.

use std::path::{Path, PathBuf};

use anyhow::Context;
use ndarray::Array3;
use serde::{Deserialize, Serialize};

use mrpcen_core::mel::{log_compress, mel_spectrogram};
use mrpcen_core::npy::write_npy_f32;
use mrpcen_core::pcen::{multi_rate_pcen, pcen_transform};
use mrpcen_core::AudioClip;

use crate::config::{PipelineConfig, Representation};

/// Metadata stored next to each feature tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub clip_id: String,
    pub config_hash: String,
    /// Smoother rates, one per tensor layer; empty for `logmel`.
    pub schedule: Vec<f64>,
    /// Frames per second along the tensor's time axis.
    pub frame_rate: f64,
}

/// The schedule the sidecar advertises for a given representation.
pub fn sidecar_schedule(config: &PipelineConfig) -> Vec<f64> {
    match config.representation {
        Representation::Logmel => Vec::new(),
        Representation::Pcen => config.rates.first().copied().into_iter().collect(),
        Representation::Mrpcen => config.rates.clone(),
    }
}

/// Computes the configured representation for one clip.
pub fn featurize_clip(clip: &AudioClip, config: &PipelineConfig) -> anyhow::Result<Array3<f32>> {
    let spec = config.frame_spec()?;
    let energy = mel_spectrogram(clip, &spec)
        .context("computing the mel spectrogram")?;
    let stacked: Array3<f64> = match config.representation {
        Representation::Logmel => {
            let m = log_compress(energy.values(), config.top_db)?;
            m.insert_axis(ndarray::Axis(2))
        }
        Representation::Pcen => {
            let m = pcen_transform(&energy, &config.pcen_params()?)?;
            m.insert_axis(ndarray::Axis(2))
        }
        Representation::Mrpcen => {
            multi_rate_pcen(&energy, &config.schedule()?, &config.pcen_params()?)?
                .values()
                .clone()
        }
    };
    Ok(stacked.mapv(|v| v as f32))
}

/// Paths of the tensor and sidecar for a clip inside a feature directory.
pub fn feature_paths(dir: &Path, clip_id: &str) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("{clip_id}.npy")),
        dir.join(format!("{clip_id}.json")),
    )
}

/// Writes the tensor and its sidecar.
pub fn write_feature(
    dir: &Path,
    clip_id: &str,
    tensor: &Array3<f32>,
    sidecar: &Sidecar,
) -> anyhow::Result<()> {
    let (npy, json) = feature_paths(dir, clip_id);
    write_npy_f32(&npy, tensor.view().into_dyn())
        .with_context(|| format!("writing {}", npy.display()))?;
    let mut text = serde_json::to_string_pretty(sidecar)?;
    text.push('\n');
    std::fs::write(&json, text).with_context(|| format!("writing {}", json.display()))?;
    Ok(())
}

pub fn read_sidecar(path: &Path) -> anyhow::Result<Sidecar> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading sidecar {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing sidecar {}", path.display()))
}
