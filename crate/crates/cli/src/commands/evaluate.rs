//! Segment-based evaluation of prediction CSVs against reference
//! annotations, with a clip-level bootstrap for confidence intervals.
//!
//! Predictions live in a directory of `{clip_id}.csv` files. A missing
//! prediction file counts the clip as all-misses (with a warning) rather
//! than failing the run; a malformed reference clip is a per-clip failure.

use std::io::Write as _;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use mrpcen_core::audio::wav_info;
use mrpcen_core::eval::{
    bootstrap_evaluate, compute_metrics, segment_counts, MetricsReport, SegmentCounts,
    Vocabulary,
};

use crate::config::PipelineConfig;
use crate::manifest::{event_list, read_annotation_rows, AnnotationRow, Manifest};

/// stdout/JSON form of the pooled metrics.
#[derive(Debug, Clone, Serialize)]
struct MetricsJson {
    segment_length: f64,
    n_clips: usize,
    n_missing_predictions: usize,
    n_failed: usize,
    micro: Option<MicroJson>,
    error_rate: Option<f64>,
    per_class: Vec<ClassJson>,
}

#[derive(Debug, Clone, Serialize)]
struct MicroJson {
    precision: f64,
    recall: f64,
    f1: f64,
}

#[derive(Debug, Clone, Serialize)]
struct ClassJson {
    label: String,
    precision: f64,
    recall: f64,
    f1: f64,
    support: usize,
}

/// Mean and central 95% interval of one bootstrapped quantity.
#[derive(Debug, Clone, Serialize)]
struct IntervalJson {
    mean: f64,
    p2_5: f64,
    p97_5: f64,
}

#[derive(Debug, Clone, Serialize)]
struct BootstrapJson {
    n_replicates: usize,
    n_samples: usize,
    seed: u64,
    precision: Option<IntervalJson>,
    recall: Option<IntervalJson>,
    f1: Option<IntervalJson>,
    error_rate: Option<IntervalJson>,
}

/// Runs evaluation; returns the process exit code (0 clean, 1 partial).
pub fn run(
    manifest_path: &Path,
    config_path: Option<&Path>,
    predictions_dir: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> anyhow::Result<i32> {
    let manifest = Manifest::load(manifest_path)?;
    let config = PipelineConfig::load(config_path)?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let seed = seed_override.unwrap_or(config.eval.seed);

    let outcome = evaluate_dataset(&manifest, &config, predictions_dir, seed)?;
    write_outputs(&outcome, out_dir)?;

    match &outcome.metrics.micro {
        Some(micro) => log::info!(
            "evaluate: micro F1 {:.4} over {} clips ({} missing predictions, {} failed)",
            micro.f1,
            outcome.metrics.n_clips,
            outcome.metrics.n_missing_predictions,
            outcome.metrics.n_failed
        ),
        None => log::info!("evaluate: no scorable clips"),
    }
    Ok(if outcome.metrics.n_failed > 0 { 1 } else { 0 })
}

struct EvalOutcome {
    metrics: MetricsJson,
    replicates: Vec<MetricsReport>,
    bootstrap: BootstrapJson,
}

fn evaluate_dataset(
    manifest: &Manifest,
    config: &PipelineConfig,
    predictions_dir: &Path,
    seed: u64,
) -> anyhow::Result<EvalOutcome> {
    let segment_length = config.eval.segment_length;
    let empty = |n_failed| MetricsJson {
        segment_length,
        n_clips: 0,
        n_missing_predictions: 0,
        n_failed,
        micro: None,
        error_rate: None,
        per_class: Vec::new(),
    };
    let no_bootstrap = BootstrapJson {
        n_replicates: 0,
        n_samples: 0,
        seed,
        precision: None,
        recall: None,
        f1: None,
        error_rate: None,
    };

    if manifest.entries.is_empty() {
        return Ok(EvalOutcome {
            metrics: empty(0),
            replicates: Vec::new(),
            bootstrap: no_bootstrap,
        });
    }
    let vocabulary = manifest.eval_vocabulary()?;

    let mut per_clip: Vec<SegmentCounts> = Vec::new();
    let mut n_missing = 0usize;
    let mut n_failed = 0usize;
    for entry in &manifest.entries {
        match score_clip(entry_paths(entry), &vocabulary, predictions_dir, segment_length) {
            Ok((counts, missing)) => {
                if missing {
                    n_missing += 1;
                    log::warn!(
                        "{}: no prediction file, scoring as all-misses",
                        entry.clip_id
                    );
                }
                per_clip.push(counts);
            }
            Err(err) => {
                n_failed += 1;
                log::warn!("{}: {err:#}", entry.clip_id);
            }
        }
    }

    if per_clip.is_empty() {
        return Ok(EvalOutcome {
            metrics: empty(n_failed),
            replicates: Vec::new(),
            bootstrap: no_bootstrap,
        });
    }

    let mut pooled = per_clip[0].clone();
    for counts in &per_clip[1..] {
        pooled.merge(counts)?;
    }
    let report = compute_metrics(&pooled);

    let replicates = bootstrap_evaluate(
        &per_clip,
        config.eval.bootstrap_samples,
        config.eval.bootstrap_reps,
        seed,
    )?;
    let bootstrap = summarize_bootstrap(&replicates, config.eval.bootstrap_samples, seed);

    Ok(EvalOutcome {
        metrics: MetricsJson {
            segment_length,
            n_clips: per_clip.len(),
            n_missing_predictions: n_missing,
            n_failed,
            micro: Some(MicroJson {
                precision: report.micro.precision,
                recall: report.micro.recall,
                f1: report.micro.f1,
            }),
            error_rate: report.error_rate,
            per_class: report
                .per_class
                .iter()
                .map(|c| ClassJson {
                    label: c.label.clone(),
                    precision: c.precision,
                    recall: c.recall,
                    f1: c.f1,
                    support: c.support,
                })
                .collect(),
        },
        replicates,
        bootstrap,
    })
}

struct ClipPaths<'a> {
    clip_id: &'a str,
    audio: &'a Path,
    annotations: &'a Path,
}

fn entry_paths(entry: &crate::manifest::ManifestEntry) -> ClipPaths<'_> {
    ClipPaths {
        clip_id: &entry.clip_id,
        audio: &entry.audio,
        annotations: &entry.annotations,
    }
}

/// Scores one clip. Returns its counts and whether the prediction file was
/// missing.
fn score_clip(
    paths: ClipPaths<'_>,
    vocabulary: &Vocabulary,
    predictions_dir: &Path,
    segment_length: f64,
) -> anyhow::Result<(SegmentCounts, bool)> {
    let (n_samples, sample_rate) = wav_info(paths.audio)?;
    let duration = n_samples as f64 / sample_rate as f64;

    let ref_rows = read_annotation_rows(paths.annotations)?;
    let reference = event_list(&ref_rows, duration, vocabulary)?;

    let pred_path = predictions_dir.join(format!("{}.csv", paths.clip_id));
    let (est_rows, missing) = if pred_path.exists() {
        (read_annotation_rows(&pred_path)?, false)
    } else {
        (Vec::new(), true)
    };
    let est_rows = clamp_rows(&est_rows, duration);
    let estimate = event_list(&est_rows, duration, vocabulary)?;

    let counts = segment_counts(&reference, &estimate, segment_length)?;
    Ok((counts, missing))
}

/// Detector events end on frame boundaries, so the final one can overhang
/// the audio by up to a frame period. Clip predictions to the reference
/// timeline instead of rejecting them.
fn clamp_rows(rows: &[AnnotationRow], duration: f64) -> Vec<AnnotationRow> {
    rows.iter()
        .filter(|r| r.onset < duration)
        .map(|r| AnnotationRow {
            onset: r.onset,
            offset: r.offset.min(duration),
            label: r.label.clone(),
        })
        .collect()
}

// ===== bootstrap summaries =====

/// Mean and 2.5/97.5 percentiles (linear interpolation between order
/// statistics) of a bootstrap sample.
fn summarize_values(values: &[f64]) -> Option<IntervalJson> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite metric values"));
    let percentile = |q: f64| -> f64 {
        let rank = q * (sorted.len() - 1) as f64;
        let lo = rank.floor() as usize;
        let hi = rank.ceil() as usize;
        let frac = rank - lo as f64;
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    };
    Some(IntervalJson {
        mean: values.iter().sum::<f64>() / values.len() as f64,
        p2_5: percentile(0.025),
        p97_5: percentile(0.975),
    })
}

fn summarize_bootstrap(
    replicates: &[MetricsReport],
    n_samples: usize,
    seed: u64,
) -> BootstrapJson {
    let collect = |f: fn(&MetricsReport) -> f64| -> Vec<f64> {
        replicates.iter().map(f).collect()
    };
    let error_rates: Vec<f64> = replicates.iter().filter_map(|r| r.error_rate).collect();
    BootstrapJson {
        n_replicates: replicates.len(),
        n_samples,
        seed,
        precision: summarize_values(&collect(|r| r.micro.precision)),
        recall: summarize_values(&collect(|r| r.micro.recall)),
        f1: summarize_values(&collect(|r| r.micro.f1)),
        error_rate: summarize_values(&error_rates),
    }
}

// ===== output files =====

fn write_json<T: Serialize>(out_dir: &Path, name: &str, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    let path = out_dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_outputs(outcome: &EvalOutcome, out_dir: &Path) -> anyhow::Result<()> {
    write_json(out_dir, "metrics.json", &outcome.metrics)?;
    write_json(out_dir, "bootstrap_summary.json", &outcome.bootstrap)?;

    let mut metrics_csv = String::from("label,precision,recall,f1,support\n");
    for class in &outcome.metrics.per_class {
        metrics_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            class.label, class.precision, class.recall, class.f1, class.support
        ));
    }
    if let Some(micro) = &outcome.metrics.micro {
        let total_support: usize = outcome.metrics.per_class.iter().map(|c| c.support).sum();
        metrics_csv.push_str(&format!(
            "micro,{},{},{},{}\n",
            micro.precision, micro.recall, micro.f1, total_support
        ));
    }
    let path = out_dir.join("metrics.csv");
    std::fs::write(&path, metrics_csv).with_context(|| format!("writing {}", path.display()))?;

    let path = out_dir.join("bootstrap.csv");
    let mut file =
        std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    writeln!(file, "replicate,precision,recall,f1,error_rate")?;
    for (i, rep) in outcome.replicates.iter().enumerate() {
        let er = rep
            .error_rate
            .map(|v| v.to_string())
            .unwrap_or_default();
        writeln!(
            file,
            "{},{},{},{},{}",
            i, rep.micro.precision, rep.micro.recall, rep.micro.f1, er
        )?;
    }
    Ok(())
}
