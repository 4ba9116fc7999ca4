//! The Monte Carlo studies behind each subcommand.

mod bound;
mod brw;
mod clt;
mod depth;
mod diag;
mod simulate;
mod ulln;

use ppdepth_core::generators::{mix_tags, sample_pattern, RngStream};
use ppdepth_core::measure::{pattern_integral, EvalFunction};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::Result;
use crate::pool::run_indexed;
use crate::record::{RecordSink, Report};
use crate::stats;

pub use self::diag::symmetrized_sup;

/// A validated config together with the resolved worker count.
pub struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pub threads: usize,
    pub hash: String,
}

impl<'a> Context<'a> {
    pub fn new(config: &'a ExperimentConfig, threads: usize) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            threads,
            hash: config.hash(),
        })
    }

    fn kind(&self) -> ExperimentKind {
        self.config.experiment
    }

    /// Stream of replicate `rep` within the block identified by `tags`.
    pub fn stream(&self, tags: &[u64], rep: usize) -> RngStream {
        let mut all = vec![self.kind().tag()];
        all.extend_from_slice(tags);
        RngStream::for_replicate(self.config.seed, mix_tags(&all), rep as u64)
    }

    pub fn sink(&self) -> RecordSink {
        RecordSink::new(self.kind(), self.hash.clone(), self.config.seed)
    }

    /// Runs `task` for replicates `0..R` in parallel, in replicate order.
    pub fn replicates<R: Send>(&self, task: impl Fn(usize) -> Result<R> + Sync + Send) -> Result<Vec<R>> {
        run_indexed(self.threads, self.config.replicates, task)
    }
}

/// Runs the experiment named in the config.
pub fn run(config: &ExperimentConfig, threads: usize) -> Result<Report> {
    let ctx = Context::new(config, threads)?;
    match config.experiment {
        ExperimentKind::Ulln => ulln::run(&ctx),
        ExperimentKind::Clt => clt::run(&ctx),
        ExperimentKind::Bound => bound::run(&ctx),
        ExperimentKind::Depth => depth::run(&ctx),
        ExperimentKind::Brw => brw::run(&ctx),
        ExperimentKind::Diag => diag::run(&ctx),
        ExperimentKind::Simulate => simulate::run(&ctx),
    }
}

/// Covariance of `(Y(f))_f` from independent single-pattern draws.
pub(crate) struct GroundTruth {
    /// `cov[a][b]` and its standard error.
    pub cov: Vec<Vec<f64>>,
    pub cov_se: Vec<Vec<f64>>,
    /// Per-point averages of `f(X) g(X)` over all drawn points.
    pub point_moment: Vec<Vec<f64>>,
}

const GROUND_TRUTH_CHUNK: usize = 10_000;

pub(crate) fn ground_truth(ctx: &Context<'_>, fs: &[EvalFunction<f64>], draws: usize) -> Result<GroundTruth> {
    let k = fs.len();
    let chunks = draws.div_ceil(GROUND_TRUTH_CHUNK);
    let cfg = ctx.config;
    let parts = run_indexed(ctx.threads, chunks, |c| {
        let mut rng = ctx.stream(&[u64::MAX], c);
        let len = GROUND_TRUTH_CHUNK.min(draws - c * GROUND_TRUTH_CHUNK);
        let mut ys = Vec::with_capacity(len * k);
        let mut prod = vec![0.0; k * k];
        let mut points = 0u64;
        let mut vals = vec![0.0; k];
        for _ in 0..len {
            let p = sample_pattern(&cfg.count, &cfg.disp, &mut rng);
            for f in fs {
                ys.push(pattern_integral(p.view(), f)?);
            }
            for y in p.points() {
                for (a, f) in fs.iter().enumerate() {
                    vals[a] = f.eval(y)?;
                }
                for a in 0..k {
                    for b in 0..k {
                        prod[a * k + b] += vals[a] * vals[b];
                    }
                }
            }
            points += p.len() as u64;
        }
        Ok((ys, prod, points))
    })?;
    let mut cols = vec![Vec::with_capacity(draws); k];
    let mut prod = vec![0.0; k * k];
    let mut points = 0u64;
    for (ys, pr, pts) in parts {
        for row in ys.chunks_exact(k) {
            for a in 0..k {
                cols[a].push(row[a]);
            }
        }
        for (t, v) in prod.iter_mut().zip(pr) {
            *t += v;
        }
        points += pts;
    }
    let mat = |f: &dyn Fn(usize, usize) -> f64| (0..k).map(|a| (0..k).map(|b| f(a, b)).collect()).collect();
    Ok(GroundTruth {
        cov: mat(&|a, b| stats::covariance(&cols[a], &cols[b])),
        cov_se: mat(&|a, b| stats::covariance_se(&cols[a], &cols[b])),
        point_moment: mat(&|a, b| prod[a * k + b] / points as f64),
    })
}
