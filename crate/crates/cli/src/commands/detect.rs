//! Fixed-threshold event detection over previously written feature files.
//!
//! Reads each clip's NPY tensor and sidecar, averages multi-layer stacks
//! down to one band-by-frame matrix, thresholds per-class band means, and
//! writes one prediction CSV per clip.

use std::path::Path;

use anyhow::Context;
use ndarray::{Array2, Axis};
use serde::Serialize;

use mrpcen_core::eval::{threshold_detector, FeatureView, Vocabulary};
use mrpcen_core::npy::read_npy_f32;

use crate::config::PipelineConfig;
use crate::features::{feature_paths, read_sidecar};
use crate::manifest::{annotation_rows, write_annotation_rows, Manifest};

/// Outcome of a detection run.
#[derive(Debug, Clone, Serialize)]
pub struct DetectSummary {
    pub n_written: usize,
    pub n_failed: usize,
    pub n_events: usize,
}

/// Runs detection; returns the process exit code (0 clean, 1 partial).
pub fn run(
    manifest_path: &Path,
    config_path: Option<&Path>,
    features_dir: &Path,
    out_dir: &Path,
) -> anyhow::Result<i32> {
    let manifest = Manifest::load(manifest_path)?;
    let config = PipelineConfig::load(config_path)?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let summary = detect_dataset(&manifest, &config, features_dir, out_dir)?;
    log::info!(
        "detect: {} prediction files written ({} events), {} clips failed",
        summary.n_written,
        summary.n_events,
        summary.n_failed
    );
    Ok(if summary.n_failed > 0 { 1 } else { 0 })
}

/// The detection loop, separated from argument plumbing for tests.
pub fn detect_dataset(
    manifest: &Manifest,
    config: &PipelineConfig,
    features_dir: &Path,
    out_dir: &Path,
) -> anyhow::Result<DetectSummary> {
    if manifest.entries.is_empty() {
        return Ok(DetectSummary {
            n_written: 0,
            n_failed: 0,
            n_events: 0,
        });
    }
    let vocabulary = manifest.eval_vocabulary()?;
    // The detector validates range coverage per clip; catch the obvious
    // configuration mistake (no ranges at all) with a clearer message.
    if config.detector.ranges().is_empty() {
        anyhow::bail!(
            "detector.band_ranges is empty; every vocabulary label needs a band range"
        );
    }

    let mut summary = DetectSummary {
        n_written: 0,
        n_failed: 0,
        n_events: 0,
    };
    for entry in &manifest.entries {
        match detect_clip(&entry.clip_id, &vocabulary, config, features_dir) {
            Ok(events) => {
                let rows = annotation_rows(&events);
                let path = out_dir.join(format!("{}.csv", entry.clip_id));
                write_annotation_rows(&path, &rows)
                    .with_context(|| format!("writing {}", path.display()))?;
                summary.n_written += 1;
                summary.n_events += rows.len();
            }
            Err(err) => {
                summary.n_failed += 1;
                log::warn!("{}: {err:#}", entry.clip_id);
            }
        }
    }
    Ok(summary)
}

fn detect_clip(
    clip_id: &str,
    vocabulary: &Vocabulary,
    config: &PipelineConfig,
    features_dir: &Path,
) -> anyhow::Result<mrpcen_core::eval::EventList> {
    let (npy_path, sidecar_path) = feature_paths(features_dir, clip_id);
    let tensor = read_npy_f32(&npy_path)?;
    let sidecar = read_sidecar(&sidecar_path)?;

    let tensor = tensor
        .into_dimensionality::<ndarray::Ix3>()
        .with_context(|| format!("{}: expected a rank-3 feature tensor", npy_path.display()))?;
    // Averaging the layer axis first, then bands, equals the stack detector's
    // mean over bands x layers, so single-layer and multi-layer files share
    // one code path.
    let matrix: Array2<f64> = tensor.mapv(f64::from).mean_axis(Axis(2)).expect("n_layers >= 1");

    let events = threshold_detector(
        FeatureView::Matrix {
            values: &matrix,
            frame_rate: sidecar.frame_rate,
        },
        vocabulary,
        &config.detector.ranges(),
        config.detector.threshold,
    )?;
    Ok(events)
}
