//! Dataset augmentation: reverberation against measured or synthetic impulse
//! responses, plus pitch shifting. Produces a new dataset directory with its
//! own manifest. Both transforms preserve event timing, so annotation files
//! are copied through unchanged.

use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;

use mrpcen_core::audio::{load_wav, write_wav_f32, AudioClip};
use mrpcen_core::augment::{
    convolve_reverb, pitch_shift, synth_impulse_response, ImpulseResponse,
};

use crate::config::{IrSpec, PipelineConfig};
use crate::manifest::{Manifest, ManifestEntry};

/// Outcome of an augmentation run.
#[derive(Debug, Clone, Serialize)]
pub struct AugmentSummary {
    pub n_input: usize,
    pub n_output: usize,
    pub n_failed: usize,
    pub manifest_path: PathBuf,
}

/// Runs augmentation; returns the process exit code (0 clean, 1 partial).
pub fn run(
    manifest_path: &Path,
    config_path: Option<&Path>,
    out_dir: &Path,
    jobs: usize,
) -> anyhow::Result<i32> {
    let manifest = Manifest::load(manifest_path)?;
    let config = PipelineConfig::load(config_path)?;
    let summary = augment_dataset(&manifest, &config, out_dir, jobs)?;
    log::info!(
        "augment: {} clips in, {} clips out, {} variants failed",
        summary.n_input,
        summary.n_output,
        summary.n_failed
    );
    Ok(if summary.n_failed > 0 { 1 } else { 0 })
}

/// Expanded variants of one input clip, or reasons they could not be made.
struct ClipExpansion {
    entries: Vec<ManifestEntry>,
    failures: Vec<String>,
}

/// The augmentation loop, separated from argument plumbing for tests.
pub fn augment_dataset(
    manifest: &Manifest,
    config: &PipelineConfig,
    out_dir: &Path,
    jobs: usize,
) -> anyhow::Result<AugmentSummary> {
    let audio_dir = out_dir.join("audio");
    let ann_dir = out_dir.join("annotations");
    std::fs::create_dir_all(&audio_dir)
        .with_context(|| format!("creating {}", audio_dir.display()))?;
    std::fs::create_dir_all(&ann_dir)
        .with_context(|| format!("creating {}", ann_dir.display()))?;

    let irs = prepare_impulse_responses(config)?;
    let shifts = &config.augment.pitch_shifts;

    let process = || -> anyhow::Result<Vec<ClipExpansion>> {
        manifest
            .entries
            .par_iter()
            .map(|entry| expand_entry(entry, &irs, shifts, &audio_dir, &ann_dir))
            .collect()
    };
    let expansions = if jobs == 0 {
        process()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .context("building worker pool")?;
        pool.install(process)?
    };

    let mut entries = Vec::new();
    let mut n_failed = 0;
    for (source, expansion) in manifest.entries.iter().zip(expansions) {
        if config.augment.keep_originals {
            entries.push(source.clone());
        }
        n_failed += expansion.failures.len();
        for failure in &expansion.failures {
            log::warn!("{failure}");
        }
        entries.extend(expansion.entries);
    }

    let out_manifest = Manifest {
        vocabulary: manifest.vocabulary.clone(),
        entries,
    };
    let manifest_path = out_dir.join("manifest.json");
    out_manifest.save(&manifest_path)?;

    Ok(AugmentSummary {
        n_input: manifest.entries.len(),
        n_output: out_manifest.entries.len(),
        n_failed,
        manifest_path,
    })
}

/// Loads WAV impulse responses and renders synthetic ones up front so each
/// worker reuses the same taps.
fn prepare_impulse_responses(
    config: &PipelineConfig,
) -> anyhow::Result<Vec<ImpulseResponse>> {
    config
        .augment
        .impulse_responses
        .iter()
        .map(|spec| match spec {
            IrSpec::Wav { path, label } => {
                let clip = load_wav(path)
                    .with_context(|| format!("loading impulse response {}", path.display()))?;
                Ok(ImpulseResponse {
                    samples: clip.samples().to_vec(),
                    sample_rate: clip.sample_rate(),
                    label: label.clone(),
                })
            }
            IrSpec::Synthetic {
                tau_c,
                duration,
                seed,
                ..
            } => {
                let mut ir =
                    synth_impulse_response(*tau_c, *duration, config.sample_rate, *seed)?;
                ir.label = spec.label();
                Ok(ir)
            }
        })
        .collect()
}

fn expand_entry(
    source: &ManifestEntry,
    irs: &[ImpulseResponse],
    shifts: &[f64],
    audio_dir: &Path,
    ann_dir: &Path,
) -> anyhow::Result<ClipExpansion> {
    let mut expansion = ClipExpansion {
        entries: Vec::new(),
        failures: Vec::new(),
    };
    let clip = match load_wav(&source.audio) {
        Ok(clip) => clip,
        Err(err) => {
            expansion
                .failures
                .push(format!("{}: {err}", source.clip_id));
            return Ok(expansion);
        }
    };

    for ir in irs {
        let variant_id = format!("{}__ir-{}", source.clip_id, ir.label);
        match convolve_reverb(&clip, ir) {
            Ok(wet) => expansion.entries.push(write_variant(
                &variant_id,
                &wet,
                source,
                audio_dir,
                ann_dir,
            )?),
            Err(err) => expansion.failures.push(format!("{variant_id}: {err}")),
        }
    }
    for &shift in shifts {
        let variant_id = format!("{}__ps{shift:+}", source.clip_id);
        match pitch_shift(&clip, shift) {
            Ok(shifted) => expansion.entries.push(write_variant(
                &variant_id,
                &shifted,
                source,
                audio_dir,
                ann_dir,
            )?),
            Err(err) => expansion.failures.push(format!("{variant_id}: {err}")),
        }
    }
    Ok(expansion)
}

/// Writes one variant's audio, copies its annotations, and returns its entry.
/// Output-side errors abort the run.
fn write_variant(
    variant_id: &str,
    clip: &AudioClip,
    source: &ManifestEntry,
    audio_dir: &Path,
    ann_dir: &Path,
) -> anyhow::Result<ManifestEntry> {
    let audio = audio_dir.join(format!("{variant_id}.wav"));
    let annotations = ann_dir.join(format!("{variant_id}.csv"));
    write_wav_f32(&audio, clip.samples(), clip.sample_rate())
        .with_context(|| format!("writing {}", audio.display()))?;
    std::fs::copy(&source.annotations, &annotations).with_context(|| {
        format!(
            "copying {} to {}",
            source.annotations.display(),
            annotations.display()
        )
    })?;
    Ok(ManifestEntry {
        clip_id: variant_id.to_string(),
        audio,
        annotations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use mrpcen_core::audio::write_wav_i16;

    fn source_dataset(dir: &Path, n: usize) -> Manifest {
        let mut entries = Vec::new();
        for i in 0..n {
            let id = format!("clip_{i}");
            let wav = dir.join(format!("{id}.wav"));
            let csv = dir.join(format!("{id}.csv"));
            let tone: Vec<f64> = (0..44_100)
                .map(|n| {
                    0.4 * (2.0 * std::f64::consts::PI * 440.0 * n as f64 / 44_100.0).sin()
                })
                .collect();
            write_wav_i16(&wav, &tone, 44_100).unwrap();
            std::fs::write(&csv, "onset,offset,label\n0.1,0.6,tone\n").unwrap();
            entries.push(ManifestEntry {
                clip_id: id,
                audio: wav,
                annotations: csv,
            });
        }
        Manifest {
            vocabulary: vec!["tone".into()],
            entries,
        }
    }

    fn plan() -> PipelineConfig {
        let mut c = PipelineConfig::default();
        c.augment.impulse_responses = vec![IrSpec::Synthetic {
            tau_c: 0.1,
            duration: 0.25,
            seed: 7,
            label: None,
        }];
        c.augment.pitch_shifts = vec![-1.0, 2.0];
        c
    }

    #[test]
    fn output_count_follows_the_plan() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("augmented");
        let manifest = source_dataset(dir.path(), 3);

        let summary = augment_dataset(&manifest, &plan(), &out, 1).unwrap();
        // 1 original + 1 reverb + 2 shifts per input clip.
        assert_eq!(summary.n_output, 3 * 4);
        assert_eq!(summary.n_failed, 0);

        let loaded = Manifest::load(&summary.manifest_path).unwrap();
        assert_eq!(loaded.entries.len(), 12);
        let ids: Vec<&str> = loaded.entries.iter().map(|e| e.clip_id.as_str()).collect();
        assert!(ids.contains(&"clip_0"));
        assert!(ids.contains(&"clip_0__ir-tau0.1"));
        assert!(ids.contains(&"clip_0__ps-1"));
        assert!(ids.contains(&"clip_0__ps+2"));
        for entry in &loaded.entries {
            assert!(entry.audio.exists(), "{} audio missing", entry.clip_id);
            assert!(entry.annotations.exists(), "{} csv missing", entry.clip_id);
        }
    }

    #[test]
    fn dropping_originals_halves_nothing_but_excludes_sources() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("augmented");
        let manifest = source_dataset(dir.path(), 2);
        let mut config = plan();
        config.augment.keep_originals = false;

        let summary = augment_dataset(&manifest, &config, &out, 1).unwrap();
        assert_eq!(summary.n_output, 2 * 3);
        let loaded = Manifest::load(&summary.manifest_path).unwrap();
        assert!(loaded.entries.iter().all(|e| e.clip_id.contains("__")));
    }

    #[test]
    fn annotations_ride_along_unchanged() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("augmented");
        let manifest = source_dataset(dir.path(), 1);
        let summary = augment_dataset(&manifest, &plan(), &out, 1).unwrap();
        let loaded = Manifest::load(&summary.manifest_path).unwrap();

        let original = std::fs::read_to_string(&manifest.entries[0].annotations).unwrap();
        for entry in loaded.entries.iter().filter(|e| e.clip_id.contains("__")) {
            let copy = std::fs::read_to_string(&entry.annotations).unwrap();
            assert_eq!(copy, original, "{}", entry.clip_id);
        }
    }

    #[test]
    fn mismatched_ir_rate_fails_that_variant_only() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("augmented");
        let manifest = source_dataset(dir.path(), 2);

        let ir_path = dir.path().join("ir48k.wav");
        write_wav_i16(&ir_path, &[1.0, 0.5, 0.25], 48_000).unwrap();
        let mut config = PipelineConfig::default();
        config.augment.impulse_responses = vec![IrSpec::Wav {
            path: ir_path,
            label: "room".into(),
        }];

        let summary = augment_dataset(&manifest, &config, &out, 1).unwrap();
        assert_eq!(summary.n_failed, 2);
        // Originals still listed; the failed variants are not.
        assert_eq!(summary.n_output, 2);
    }
}
