//! Batch featurization: one NPY tensor + JSON sidecar per manifest clip,
//! plus a `run_manifest.json` summary.
//!
//! Re-runs are idempotent: a clip whose sidecar already carries the active
//! config hash is skipped unless `--force` is given. Unreadable input audio
//! marks the clip failed and processing continues (partial-failure exit);
//! an unwritable output directory is fatal.

use std::path::Path;

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;

use mrpcen_core::audio::load_wav;
use mrpcen_core::npy::read_npy_header;

use crate::config::PipelineConfig;
use crate::features::{
    featurize_clip, feature_paths, read_sidecar, sidecar_schedule, write_feature, Sidecar,
};
use crate::manifest::{Manifest, ManifestEntry};

/// Fate of one clip in a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClipStatus {
    Written,
    Cached,
    Failed,
}

/// Per-clip record in the run manifest.
#[derive(Debug, Clone, Serialize)]
pub struct ClipRecord {
    pub clip_id: String,
    pub status: ClipStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// The run manifest written next to the feature files.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub config_hash: String,
    pub n_written: usize,
    pub n_cached: usize,
    pub n_failed: usize,
    pub clips: Vec<ClipRecord>,
}

/// Runs featurization; returns the process exit code (0 clean, 1 partial).
pub fn run(
    manifest_path: &Path,
    config_path: Option<&Path>,
    out_dir: &Path,
    force: bool,
    jobs: usize,
) -> anyhow::Result<i32> {
    let manifest = Manifest::load(manifest_path)?;
    let config = PipelineConfig::load(config_path)?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let summary = featurize_dataset(&manifest, &config, out_dir, force, jobs)?;

    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    let run_path = out_dir.join("run_manifest.json");
    std::fs::write(&run_path, text)
        .with_context(|| format!("writing {}", run_path.display()))?;

    log::info!(
        "featurize: {} written, {} cached, {} failed",
        summary.n_written,
        summary.n_cached,
        summary.n_failed
    );
    Ok(if summary.n_failed > 0 { 1 } else { 0 })
}

/// The featurization loop, separated from argument/IO plumbing for tests.
pub fn featurize_dataset(
    manifest: &Manifest,
    config: &PipelineConfig,
    out_dir: &Path,
    force: bool,
    jobs: usize,
) -> anyhow::Result<RunSummary> {
    let hash = config.config_hash();

    let process = || -> anyhow::Result<Vec<ClipRecord>> {
        manifest
            .entries
            .par_iter()
            .map(|entry| process_entry(entry, config, &hash, out_dir, force))
            .collect()
    };
    let records = if jobs == 0 {
        process()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .context("building worker pool")?;
        pool.install(process)?
    };

    let count = |status: &ClipStatus| records.iter().filter(|r| &r.status == status).count();
    Ok(RunSummary {
        config_hash: hash,
        n_written: count(&ClipStatus::Written),
        n_cached: count(&ClipStatus::Cached),
        n_failed: count(&ClipStatus::Failed),
        clips: records,
    })
}

/// Input-side problems become a failed record; output-side problems are
/// returned as errors and abort the run.
fn process_entry(
    entry: &ManifestEntry,
    config: &PipelineConfig,
    hash: &str,
    out_dir: &Path,
    force: bool,
) -> anyhow::Result<ClipRecord> {
    let (npy_path, sidecar_path) = feature_paths(out_dir, &entry.clip_id);

    if !force && npy_path.exists() {
        if let Ok(sidecar) = read_sidecar(&sidecar_path) {
            if sidecar.config_hash == hash {
                let shape = read_npy_header(&npy_path).ok().map(|h| h.shape);
                return Ok(ClipRecord {
                    clip_id: entry.clip_id.clone(),
                    status: ClipStatus::Cached,
                    shape,
                    error: None,
                });
            }
        }
    }

    let tensor = match load_wav(&entry.audio)
        .map_err(anyhow::Error::from)
        .and_then(|clip| featurize_clip(&clip, config))
    {
        Ok(tensor) => tensor,
        Err(err) => {
            log::warn!("{}: {err:#}", entry.clip_id);
            return Ok(ClipRecord {
                clip_id: entry.clip_id.clone(),
                status: ClipStatus::Failed,
                shape: None,
                error: Some(format!("{err:#}")),
            });
        }
    };

    let frame_rate = config.sample_rate as f64 / config.hop_length as f64;
    let sidecar = Sidecar {
        clip_id: entry.clip_id.clone(),
        config_hash: hash.to_string(),
        schedule: sidecar_schedule(config),
        frame_rate,
    };
    write_feature(out_dir, &entry.clip_id, &tensor, &sidecar)?;
    Ok(ClipRecord {
        clip_id: entry.clip_id.clone(),
        status: ClipStatus::Written,
        shape: Some(tensor.shape().to_vec()),
        error: None,
    })
}
