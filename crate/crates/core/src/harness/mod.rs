//! Seeded sweeps, curve files and run manifests.
//!
//! A run is fully described by an [`ExperimentConfig`]. Every (sweep point,
//! realization) pair is an independent task with its own random streams, so
//! the output does not depend on the number of worker threads.

mod config;
mod engine;
mod output;

use std::path::{Path, PathBuf};

pub use config::{parse_snr_range, Experiment, ExperimentConfig, SnrDb};
pub use engine::{crossing, run_experiment, run_sweep, CurvePoint, CurveSet, Series};
pub use output::{read_dat, series_stem, write_curve, DatRow, Manifest, MANIFEST_FILE, SUMMARY_FILE};

use crate::{Error, Result};

/// MC points with fewer observed errors than this are flagged.
pub const MIN_ERRORS: u64 = 100;
/// Exit with status 3 when more than this fraction of optimisations fail.
pub const MAX_FAILURE_RATE: f64 = 0.1;

/// Runs `f` on a dedicated pool with `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs `cfg` and writes its files under `cfg.output_path`.
pub fn run_and_write(cfg: &ExperimentConfig, threads: usize) -> Result<(CurveSet, Vec<PathBuf>)> {
    let curves = with_threads(threads, || run_experiment(cfg))??;
    let files = write_curve(&curves, cfg, &cfg.output_path)?;
    Ok((curves, files))
}

/// Re-runs the config stored in a manifest, optionally into another
/// directory.
pub fn replay(manifest: &Path, out: Option<&Path>, threads: usize) -> Result<(CurveSet, Vec<PathBuf>)> {
    let mut cfg = Manifest::read(manifest)?.config;
    if let Some(dir) = out {
        cfg.output_path = dir.to_path_buf();
    }
    run_and_write(&cfg, threads)
}
