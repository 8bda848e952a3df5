//! Generates the bundled miniature dataset: seeded synthetic clips with
//! tone / chirp / burst events over brown-noise background, plus a manifest
//! and a ready-to-use config.

use std::path::Path;

use crate::dataset::{generate_dataset, SynthParams};

/// Generates a dataset; returns the process exit code.
pub fn run(
    out_dir: &Path,
    seed: Option<u64>,
    n_clips: Option<usize>,
    duration: Option<f64>,
) -> anyhow::Result<i32> {
    let mut params = SynthParams::default();
    if let Some(seed) = seed {
        params.seed = seed;
    }
    if let Some(n) = n_clips {
        params.n_clips = n;
    }
    if let Some(d) = duration {
        params.duration = d;
    }

    let summary = generate_dataset(out_dir, &params)?;
    log::info!(
        "synth-dataset: {} clips, {} events, manifest {}",
        summary.n_clips,
        summary.n_events,
        summary.manifest_path.display()
    );
    println!("manifest: {}", summary.manifest_path.display());
    println!("config: {}", summary.config_path.display());
    Ok(0)
}
