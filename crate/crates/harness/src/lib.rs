//! Seeded Monte Carlo studies for the intensity-measure estimators in
//! `ppdepth-core`, with CSV / JSON output.
//!
//! Every study reads an [`ExperimentConfig`], runs its replicates on a worker
//! pool with one random stream per replicate, and returns a [`Report`] of
//! records and pass/fail checks. Outputs do not depend on the worker count.

pub mod config;
pub mod emit;
pub mod error;
pub mod experiments;
pub mod pool;
pub mod record;
pub mod stats;

pub use config::{ExperimentConfig, ExperimentKind, Format};
pub use error::{HarnessError, Result};
pub use record::{Check, Report, ResultRecord};

use std::path::{Path, PathBuf};

/// Runs `config` and writes its files into `out_dir`.
pub fn run_and_emit(config: &ExperimentConfig, threads: usize, out_dir: &Path) -> Result<(Report, Vec<PathBuf>)> {
    let report = experiments::run(config, threads)?;
    let out = emit::Output {
        dir: out_dir,
        name: &config.name,
        kind: config.experiment,
        format: config.format,
        config_hash: &config.hash(),
        seed: config.seed,
    };
    let paths = out.emit(&report.records, &report.checks, &report.files)?;
    Ok((report, paths))
}
