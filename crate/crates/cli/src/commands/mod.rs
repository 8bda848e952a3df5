//! Subcommand implementations. Each `run` returns the process exit code:
//! 0 for a clean run, 1 when some clips failed but the run completed, and
//! fatal problems surface as errors (exit 2 in `main`).

pub mod augment;
pub mod detect;
pub mod evaluate;
pub mod featurize;
pub mod inspect;
pub mod synth;
