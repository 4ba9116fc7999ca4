//! Covariance and marginal normality of `√n (μ_n(f) − μ(f))`.

use ppdepth_core::generators::{reference_for, sample_sample};
use ppdepth_core::measure::empirical_intensity;

use super::{ground_truth, Context};
use crate::error::Result;
use crate::record::{Check, Report};
use crate::stats;

pub(super) fn run(ctx: &Context<'_>) -> Result<Report> {
    let cfg = ctx.config;
    let fs = cfg.functions()?;
    let k = fs.len();
    let r = reference_for(&cfg.count, &cfg.disp)?;
    let targets: Vec<f64> = fs.iter().map(|f| r.mass(f)).collect::<ppdepth_core::Result<_>>()?;
    let gt = ground_truth(ctx, &fs, cfg.ground_truth_draws)?;
    let mut sink = ctx.sink();
    let mut checks = Vec::new();

    // Mixed binomial closed forms: E[L] Cov[f(X), g(X)], and the same plus Var[L] E[f] E[g].
    let el = cfg.count.mean();
    let var_l = cfg.count.variance();
    let point_mean: Vec<f64> = targets.iter().map(|t| t / el).collect();
    for a in 0..k {
        for b in a..k {
            let p = [("f", a as f64), ("g", b as f64)];
            let cov_x = gt.point_moment[a][b] - point_mean[a] * point_mean[b];
            sink.summary(&p, "gamma_ground_truth", gt.cov[a][b], Some(gt.cov_se[a][b]));
            sink.summary(&p, "gamma_point_formula", el * cov_x, None);
            sink.summary(&p, "gamma_mixed_binomial", el * cov_x + var_l * point_mean[a] * point_mean[b], None);
        }
    }

    let mut cov_fail = 0usize;
    let mut normal_fail = 0usize;
    for &n in &cfg.n_grid {
        let root = (n as f64).sqrt();
        let rows = ctx.replicates(|rep| {
            let mut rng = ctx.stream(&[n as u64], rep);
            let s = sample_sample(n, &cfg.count, &cfg.disp, &mut rng)?;
            fs.iter()
                .zip(&targets)
                .map(|(f, t)| Ok(root * (empirical_intensity(&s, f)? - t)))
                .collect::<Result<Vec<f64>>>()
        })?;
        let cols: Vec<Vec<f64>> = (0..k).map(|a| rows.iter().map(|row| row[a]).collect()).collect();
        for (rep, row) in rows.iter().enumerate() {
            for (a, v) in row.iter().enumerate() {
                sink.push(&[("n", n as f64), ("f", a as f64)], Some(rep as u64), "scaled_deviation", *v, None);
            }
        }
        for a in 0..k {
            for b in a..k {
                let p = [("n", n as f64), ("f", a as f64), ("g", b as f64)];
                let c = stats::covariance(&cols[a], &cols[b]);
                let se = stats::covariance_se(&cols[a], &cols[b]);
                sink.summary(&p, "replicate_covariance", c, Some(se));
                let band = cfg.cov_band * se.hypot(gt.cov_se[a][b]);
                let diff = (c - gt.cov[a][b]).abs();
                if diff > band.max(1e-12) {
                    cov_fail += 1;
                    log::warn!("n={n} ({a},{b}): covariance {c} vs ground truth {} (band {band})", gt.cov[a][b]);
                }
            }
            let p = [("n", n as f64), ("f", a as f64)];
            let skew = stats::skewness(&cols[a]);
            let kurt = stats::excess_kurtosis(&cols[a]);
            sink.summary(&p, "skewness", skew, None);
            sink.summary(&p, "excess_kurtosis", kurt, None);
            sink.summary(&p, "ks_to_normal", stats::ks_to_centered_normal(&cols[a]), None);
            if skew.abs() >= cfg.max_skewness || kurt.abs() >= cfg.max_excess_kurtosis {
                normal_fail += 1;
                log::warn!("n={n} f={a}: skewness {skew}, excess kurtosis {kurt}");
            }
        }
    }
    checks.push(Check::new(
        "covariance",
        cov_fail == 0,
        format!("{cov_fail} entries outside {} standard errors", cfg.cov_band),
    ));
    checks.push(Check::new(
        "normality",
        normal_fail == 0,
        format!(
            "{normal_fail} marginals with |skewness| >= {} or |excess kurtosis| >= {}",
            cfg.max_skewness, cfg.max_excess_kurtosis
        ),
    ));
    sink.summary(&[], "covariance_violations", cov_fail as f64, None);
    sink.summary(&[], "normality_violations", normal_fail as f64, None);
    Ok(Report {
        records: sink.records,
        checks,
        files: Vec::new(),
    })
}
