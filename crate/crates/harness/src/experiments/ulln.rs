//! Decay of the supremum deviation with the sample size.

use ppdepth_core::bounds::{class_candidates, entropy_integral};
use ppdepth_core::generators::{reference_for, sample_sample};
use ppdepth_core::measure::{sup_deviation, FunctionClass, Sample};

use super::Context;
use crate::error::Result;
use crate::record::{Check, Report};
use crate::stats;

/// Largest sample (in points) on which the entropy integral diagnostic is computed.
const ENTROPY_POINT_LIMIT: u64 = 1000;
const ENTROPY_GRID: usize = 25;

pub(super) fn run(ctx: &Context<'_>) -> Result<Report> {
    let cfg = ctx.config;
    let cls = cfg.class()?;
    let r = reference_for(&cfg.count, &cfg.disp)?;
    let mut sink = ctx.sink();
    let mut checks = Vec::new();
    let mut means = Vec::new();
    for &n in &cfg.n_grid {
        let devs = ctx.replicates(|rep| {
            let mut rng = ctx.stream(&[n as u64], rep);
            let s = sample_sample(n, &cfg.count, &cfg.disp, &mut rng)?;
            Ok(sup_deviation(&s, &cls, &r)?.value)
        })?;
        let p = [("n", n as f64)];
        for (rep, d) in devs.iter().enumerate() {
            sink.push(&p, Some(rep as u64), "sup_deviation", *d, None);
        }
        if devs.len() > 1 {
            let m = stats::mean(&devs);
            sink.summary(&p, "mean_sup_deviation", m, Some(stats::std_error(&devs)));
            sink.summary(&p, "median_sup_deviation", stats::median(&devs), None);
            means.push((n as f64, m));
        }
    }
    if cfg.replicates > 1 {
        if let Some(&n) = cfg.n_grid.iter().min() {
            let mut rng = ctx.stream(&[n as u64], 0);
            let s = sample_sample(n, &cfg.count, &cfg.disp, &mut rng)?;
            if let Some(v) = entropy_diagnostic(&s, &cls)? {
                sink.summary(&[("n", n as f64)], "entropy_integral", v, None);
            }
        }
    }
    if means.len() >= 2 {
        let (x, y): (Vec<f64>, Vec<f64>) = means.into_iter().unzip();
        if let Some(slope) = stats::log_log_slope(&x, &y) {
            sink.summary(&[], "log_log_slope", slope, None);
            if let Some(t) = cfg.slope {
                checks.push(Check::new(
                    "slope",
                    (slope - t.target).abs() <= t.tol,
                    format!("slope {slope:.4}, target {} ± {}", t.target, t.tol),
                ));
            }
        }
    }
    Ok(Report {
        records: sink.records,
        checks,
        files: Vec::new(),
    })
}

/// `∫_0^M sqrt(ln N(ε)) dε` under `e_{n,2}` on one sample, for small samples only.
fn entropy_diagnostic(s: &Sample<f64>, cls: &FunctionClass<f64>) -> Result<Option<f64>> {
    if s.s_n() > ENTROPY_POINT_LIMIT {
        return Ok(None);
    }
    let cands = class_candidates(s, cls)?;
    let e = entropy_integral(s, cls, &cands, cls.bound(), ENTROPY_GRID)?;
    Ok(Some(e.value))
}
