//! Lotka-Nagaev and Harris-type estimators on simulated branching random walks.

use ppdepth_core::branching::{grow_tree, true_laplace, DEFAULT_VERTEX_CAP};
use ppdepth_core::generators::reference_for;

use super::{ground_truth, Context};
use crate::error::Result;
use crate::record::{Check, Report};
use crate::stats;

struct TreeReplicate {
    /// `(|m̂_j(θ) − m(θ)|, |m̃_j(θ) − m(θ)|)` indexed `[j][θ]`.
    errors: Vec<Vec<(f64, f64)>>,
    /// `Ŵ_{j}, Ŵ_{j+1}, Ŵ_{j+2}` per function, for the study generation `j`.
    fluct: Vec<[f64; 3]>,
}

pub(super) fn run(ctx: &Context<'_>) -> Result<Report> {
    let cfg = ctx.config;
    let depth = cfg.generations.expect("validated");
    let fs = cfg.functions()?;
    let r = reference_for(&cfg.count, &cfg.disp)?;
    let truth: Vec<f64> = cfg
        .theta_grid
        .iter()
        .map(|&t| true_laplace(&cfg.count, &cfg.disp, t))
        .collect::<ppdepth_core::Result<_>>()?;
    let reps = ctx.replicates(|rep| {
        let mut rng = ctx.stream(&[depth as u64], rep);
        let tree = grow_tree(&cfg.count, &cfg.disp, depth, &mut rng, DEFAULT_VERTEX_CAP)?;
        let mut errors = Vec::with_capacity(cfg.j_grid.len());
        for &j in &cfg.j_grid {
            let row = cfg
                .theta_grid
                .iter()
                .zip(&truth)
                .map(|(&t, &m)| {
                    let (lot, har) = tree.laplace_estimates(j, t)?;
                    Ok(((lot - m).abs(), (har - m).abs()))
                })
                .collect::<Result<Vec<_>>>()?;
            errors.push(row);
        }
        let mut fluct = Vec::new();
        if let Some(j) = cfg.study_generation {
            let w: Vec<Vec<f64>> = (j..j + 3)
                .map(|g| tree.normalized_fluctuations(g, &fs, &r, false))
                .collect::<ppdepth_core::Result<_>>()?;
            fluct = (0..fs.len()).map(|a| [w[0][a], w[1][a], w[2][a]]).collect();
        }
        Ok(TreeReplicate { errors, fluct })
    })?;

    let mut sink = ctx.sink();
    let mut checks = Vec::new();
    let mut breaks = 0usize;
    let mut slope_fail = 0usize;
    let el = cfg.count.mean();
    for (ti, &theta) in cfg.theta_grid.iter().enumerate() {
        for (which, name) in [(0, "lotka_nagaev"), (1, "harris")] {
            let mut means = Vec::new();
            for (ji, &j) in cfg.j_grid.iter().enumerate() {
                let p = [("j", j as f64), ("theta", theta)];
                let e: Vec<f64> = reps
                    .iter()
                    .map(|rp| if which == 0 { rp.errors[ji][ti].0 } else { rp.errors[ji][ti].1 })
                    .collect();
                for (i, v) in e.iter().enumerate() {
                    sink.push(&p, Some(i as u64), &format!("{name}_abs_error"), *v, None);
                }
                let m = stats::mean(&e);
                sink.summary(&p, &format!("{name}_mean_abs_error"), m, Some(stats::std_error(&e)));
                means.push((j, m));
            }
            means.sort_by_key(|x| x.0);
            // exact estimators give zero error at every j; that counts as nonincreasing
            let exact = means.iter().all(|x| x.1 <= 1e-12 * truth[ti].abs().max(1.0));
            if !exact && means.windows(2).any(|w| w[1].1 >= w[0].1) {
                breaks += 1;
            }
            if means.len() >= 2 && !exact && el > 1.0 {
                let x: Vec<f64> = means.iter().map(|m| el.powi(m.0 as i32)).collect();
                let y: Vec<f64> = means.iter().map(|m| m.1).collect();
                if let Some(s) = stats::log_log_slope(&x, &y) {
                    sink.summary(&[("theta", theta)], &format!("{name}_slope"), s, None);
                    if let Some(t) = cfg.slope {
                        if which == 0 && (s - t.target).abs() > t.tol {
                            slope_fail += 1;
                        }
                    }
                }
            }
        }
    }
    checks.push(Check::new(
        "error_decreasing_in_j",
        breaks == 0,
        format!("{breaks} (θ, estimator) curves not strictly decreasing"),
    ));
    if let Some(t) = cfg.slope {
        checks.push(Check::new(
            "lotka_nagaev_slope",
            slope_fail == 0,
            format!("{slope_fail} θ values with slope outside {} ± {}", t.target, t.tol),
        ));
    }

    if let Some(j) = cfg.study_generation {
        let gt = ground_truth(ctx, &fs, cfg.ground_truth_draws)?;
        let rr = reps.len() as f64;
        let limit = 3.0 / rr.sqrt();
        let mut corr_fail = 0usize;
        for a in 0..fs.len() {
            let col = |k: usize| -> Vec<f64> { reps.iter().map(|rp| rp.fluct[a][k]).collect() };
            for k in 0..3 {
                let w = col(k);
                let p = [("j", (j + k) as f64), ("f", a as f64)];
                sink.summary(&p, "fluctuation_variance", stats::variance(&w), Some(stats::covariance_se(&w, &w)));
                sink.summary(&p, "gamma_ground_truth", gt.cov[a][a], Some(gt.cov_se[a][a]));
            }
            let c = stats::correlation(&col(1), &col(2));
            sink.summary(&[("j", (j + 1) as f64), ("f", a as f64)], "successive_correlation", c, None);
            if c.abs() > limit {
                corr_fail += 1;
            }
        }
        checks.push(Check::new(
            "decorrelation",
            corr_fail == 0,
            format!("{corr_fail} functions with |corr| above 3/sqrt(R) = {limit:.4}"),
        ));
    }
    sink.summary(&[], "monotonicity_breaks", breaks as f64, None);
    Ok(Report {
        records: sink.records,
        checks,
        files: Vec::new(),
    })
}
