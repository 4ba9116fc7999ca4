//! Convergence of empirical half-space depth.

use ppdepth_core::depth::{deepest_point, depth, depth_sup_deviation};
use ppdepth_core::generators::{reference_for, sample_sample};
use ppdepth_core::measure::{sup_deviation, FunctionClass, Point, ReferenceMeasure};

use super::bound::{exceedance_table, TABLE_COLUMNS};
use super::Context;
use crate::emit::table_csv;
use crate::error::Result;
use crate::record::{Check, Report};
use crate::stats;

/// Slack for the domination `sup |D − D_n| <= ‖μ_n − μ‖` in floating point.
const DOMINATION_TOL: f64 = 1e-12;

/// In the plane the exact half-plane supremum against a continuous reference
/// is quadratic in the sample size; above this many points it is skipped.
const PLANE_CLASS_LIMIT: u64 = 120;

struct Replicate {
    depth_dev: f64,
    class_dev: Option<f64>,
    depths: Vec<f64>,
    /// Distance of the deepest point to the configured center.
    center_dist: Option<f64>,
}

pub(super) fn run(ctx: &Context<'_>) -> Result<Report> {
    let cfg = ctx.config;
    let d = cfg.disp.dim();
    let cls = if d == 1 {
        FunctionClass::half_lines()
    } else {
        FunctionClass::half_spaces(d)?
    };
    let r = reference_for(&cfg.count, &cfg.disp)?;
    let xs: Vec<Point<f64>> = cfg.x_grid.iter().map(|x| Point::new(x.clone())).collect::<ppdepth_core::Result<_>>()?;
    let mut sink = ctx.sink();
    let mut dominance_fail = 0usize;
    let mut all_devs = Vec::new();
    let mut mean_devs = Vec::new();
    let mut center_means = Vec::new();
    for &n in &cfg.n_grid {
        let reps = ctx.replicates(|rep| {
            let mut rng = ctx.stream(&[n as u64], rep);
            let s = sample_sample(n, &cfg.count, &cfg.disp, &mut rng)?;
            let depth_dev = depth_sup_deviation(&s, &r, &xs)?;
            let class_dev = if d == 1 || s.s_n() <= PLANE_CLASS_LIMIT {
                Some(sup_deviation(&s, &cls, &r)?.value)
            } else {
                None
            };
            let emp = ReferenceMeasure::empirical(s);
            let depths = xs.iter().map(|x| Ok(depth(&emp, x.coords())?.depth)).collect::<Result<Vec<f64>>>()?;
            let center_dist = match &cfg.search {
                Some(b) => {
                    let (p, _) = deepest_point(&emp, &b.low, &b.high, b.grid)?;
                    b.center.as_ref().map(|c| {
                        p.coords().iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
                    })
                }
                None => None,
            };
            Ok(Replicate {
                depth_dev,
                class_dev,
                depths,
                center_dist,
            })
        })?;
        let p = [("n", n as f64)];
        let mut devs = Vec::with_capacity(reps.len());
        let mut dists = Vec::new();
        for (i, rp) in reps.iter().enumerate() {
            let rep = Some(i as u64);
            sink.push(&p, rep, "depth_sup_deviation", rp.depth_dev, None);
            if let Some(c) = rp.class_dev {
                sink.push(&p, rep, "class_sup_deviation", c, None);
                if rp.depth_dev > c + DOMINATION_TOL {
                    dominance_fail += 1;
                }
            }
            if let Some(c) = rp.center_dist {
                sink.push(&p, rep, "deepest_point_distance", c, None);
                dists.push(c);
            }
            devs.push(rp.depth_dev);
        }
        for k in 0..xs.len() {
            let v: Vec<f64> = reps.iter().map(|rp| rp.depths[k]).collect();
            sink.summary(&[("n", n as f64), ("x_index", k as f64)], "mean_empirical_depth", stats::mean(&v), Some(stats::std_error(&v)));
        }
        if devs.len() > 1 {
            let m = stats::mean(&devs);
            sink.summary(&p, "mean_depth_sup_deviation", m, Some(stats::std_error(&devs)));
            mean_devs.push((n as f64, m));
        }
        if !dists.is_empty() {
            let m = stats::mean(&dists);
            sink.summary(&p, "mean_deepest_point_distance", m, Some(stats::std_error(&dists)));
            center_means.push(m);
        }
        all_devs.push(devs);
    }
    let mut checks = vec![Check::new(
        "depth_domination",
        dominance_fail == 0,
        format!("{dominance_fail} replicates with depth deviation above the class deviation"),
    )];
    sink.summary(&[], "domination_violations", dominance_fail as f64, None);
    if mean_devs.len() >= 2 {
        let (x, y): (Vec<f64>, Vec<f64>) = mean_devs.into_iter().unzip();
        if let Some(s) = stats::log_log_slope(&x, &y) {
            sink.summary(&[], "log_log_slope", s, None);
        }
    }
    if center_means.len() >= 2 {
        let shrinks = center_means.last() < center_means.first();
        checks.push(Check::new(
            "deepest_point_trend",
            shrinks,
            format!("mean distance to center {center_means:?}"),
        ));
    }
    let mut files = Vec::new();
    if !cfg.epsilon_grid.is_empty() {
        let t = exceedance_table(ctx, &mut sink, &cfg.n_grid, &all_devs, d as u32 + 1)?;
        sink.summary(&[], "violations", t.violations as f64, None);
        sink.summary(&[], "flagged_violations", t.flagged as f64, None);
        checks.push(Check::new(
            "bound_validity",
            t.violations == 0,
            format!("{} violations beyond 3 binomial SEs", t.violations),
        ));
        files.push((format!("{}_table.csv", cfg.name), table_csv(&t.rows, TABLE_COLUMNS)?));
    }
    Ok(Report {
        records: sink.records,
        checks,
        files,
    })
}

#[cfg(test)]
mod tests {
    use crate::config::ExperimentConfig;

    #[test]
    fn one_dimensional_domination_and_outside_points() {
        let c = ExperimentConfig::from_json(
            r#"{"name":"d","experiment":"depth","count":{"kind":"fixed","k":1},
                "disp":{"kind":"uniform","low":[0],"high":[1]},
                "n_grid":[20, 200],"replicates":50,"seed":8,
                "x_grid":[[-0.5],[0.5],[1.5]],"epsilon_grid":[0.2]}"#,
        )
        .unwrap();
        let rep = crate::experiments::run(&c, 2).unwrap();
        assert!(rep.passed(), "{:?}", rep.checks);
        for r in rep.find("mean_empirical_depth") {
            if r.params["x_index"] != 1.0 {
                assert_eq!(r.value, 0.0);
            }
        }
    }

    #[test]
    fn square_deepest_point_moves_to_center() {
        let c = ExperimentConfig::from_json(
            r#"{"name":"d","experiment":"depth","count":{"kind":"fixed","k":1},
                "disp":{"kind":"uniform","low":[0,0],"high":[1,1]},
                "n_grid":[20, 400],"replicates":20,"seed":8,
                "x_grid":[[0.5,0.5],[2,2]],
                "search":{"low":[0,0],"high":[1,1],"grid":6,"center":[0.5,0.5]}}"#,
        )
        .unwrap();
        let rep = crate::experiments::run(&c, 1).unwrap();
        assert!(rep.passed(), "{:?}", rep.checks);
    }
}
