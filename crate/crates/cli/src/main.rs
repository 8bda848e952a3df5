//! `mrpcen` — batch featurization, augmentation, detection, and evaluation
//! for multi-rate normalized spectrogram features.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mrpcen_cli::commands;

/// Environment variable consulted when `featurize` gets no `--out`.
const CACHE_DIR_VAR: &str = "MRPCEN_CACHE_DIR";

#[derive(Parser)]
#[command(
    name = "mrpcen",
    version,
    about = "Multi-rate per-channel energy normalization pipeline",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one feature tensor per manifest clip, with caching.
    Featurize {
        /// Dataset manifest (JSON).
        #[arg(long)]
        manifest: PathBuf,
        /// Pipeline config (JSON); defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory; falls back to $MRPCEN_CACHE_DIR.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Recompute clips even when cached under the same config.
        #[arg(long)]
        force: bool,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Expand a dataset with reverberated and pitch-shifted variants.
    Augment {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for the augmented dataset and its manifest.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Score prediction CSVs against reference annotations.
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory of per-clip prediction CSVs.
        #[arg(long)]
        predictions: PathBuf,
        /// Directory for metrics and bootstrap outputs.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the bootstrap seed from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the fixed-threshold detector over featurized clips.
    Detect {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory of feature files from `featurize`.
        #[arg(long)]
        features: PathBuf,
        /// Directory for per-clip prediction CSVs.
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize one feature file (shape, ranges, sidecar).
    Inspect {
        /// Path to a `.npy` feature file.
        file: PathBuf,
    },
    /// Generate the miniature synthetic dataset.
    SynthDataset {
        /// Directory for audio, annotations, manifest, and config.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of clips.
        #[arg(long)]
        clips: Option<usize>,
        /// Clip length in seconds.
        #[arg(long)]
        duration: Option<f64>,
    },
}

fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Featurize {
            manifest,
            config,
            out,
            force,
            jobs,
        } => {
            let out = out
                .or_else(|| std::env::var_os(CACHE_DIR_VAR).map(PathBuf::from))
                .ok_or_else(|| {
                    anyhow::anyhow!(
                        "no output directory: pass --out or set {CACHE_DIR_VAR}"
                    )
                })?;
            commands::featurize::run(&manifest, config.as_deref(), &out, force, jobs)
        }
        Command::Augment {
            manifest,
            config,
            out,
            jobs,
        } => commands::augment::run(&manifest, config.as_deref(), &out, jobs),
        Command::Evaluate {
            manifest,
            config,
            predictions,
            out,
            seed,
        } => commands::evaluate::run(&manifest, config.as_deref(), &predictions, &out, seed),
        Command::Detect {
            manifest,
            config,
            features,
            out,
        } => commands::detect::run(&manifest, config.as_deref(), &features, &out),
        Command::Inspect { file } => commands::inspect::run(&file),
        Command::SynthDataset {
            out,
            seed,
            clips,
            duration,
        } => commands::synth::run(&out, seed, clips, duration),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            log::error!("{err:#}");
            ExitCode::from(2)
        }
    }
}
