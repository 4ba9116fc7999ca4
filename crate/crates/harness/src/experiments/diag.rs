//! Monte Carlo checks of the symmetrization inequalities.

use rand::Rng;

use ppdepth_core::generators::{reference_for, sample_sample, RngStream};
use ppdepth_core::measure::{signed_half_line_sup, sup_deviation, Sample};

use super::Context;
use crate::error::{HarnessError, Result};
use crate::record::{Check, Report};
use crate::stats;

/// `sup_H |(1/n) Σ_i ξ_i Y_i(H)|` over half-lines for signs `ξ_i` given per pattern.
pub fn symmetrized_sup(s: &Sample<f64>, signs: &[bool]) -> Result<f64> {
    assert_eq!(signs.len(), s.n());
    let w = 1.0 / s.n() as f64;
    let mut pts = Vec::with_capacity(s.s_n() as usize);
    for (i, p) in s.patterns().enumerate() {
        let wi = if signs[i] { w } else { -w };
        pts.extend(p.points().map(|y| (y[0], wi)));
    }
    Ok(signed_half_line_sup(&pts, None, 0.0)?.value)
}

fn draw_signs(n: usize, rng: &mut RngStream) -> Vec<bool> {
    (0..n).map(|_| rng.random::<bool>()).collect()
}

pub(super) fn run(ctx: &Context<'_>) -> Result<Report> {
    let cfg = ctx.config;
    let cls = cfg.class()?;
    if !matches!(cls.kind(), ppdepth_core::measure::ClassKind::HalfLines) {
        return Err(HarnessError::Config("symmetrization diagnostics need the half-line class".into()));
    }
    let r = reference_for(&cfg.count, &cfg.disp)?;
    // sup_f Var[Y(f)] <= M² E[L²] with M = 1 for indicators
    let sigma2 = cls.bound().powi(2) * cfg.count.second_moment();
    let mut sink = ctx.sink();
    let mut expectation_fail = 0usize;
    let mut probability_fail = 0usize;
    let mut probability_skipped = 0usize;
    for &n in &cfg.n_grid {
        let pairs = ctx.replicates(|rep| {
            let mut rng = ctx.stream(&[n as u64], rep);
            let s = sample_sample(n, &cfg.count, &cfg.disp, &mut rng)?;
            let lhs = sup_deviation(&s, &cls, &r)?.value;
            let mut sign_rng = rng.substream(1);
            let rhs = symmetrized_sup(&s, &draw_signs(n, &mut sign_rng))?;
            Ok((lhs, rhs))
        })?;
        let (lhs, rhs): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let p = [("n", n as f64)];
        for (i, (a, b)) in lhs.iter().zip(&rhs).enumerate() {
            sink.push(&p, Some(i as u64), "deviation", *a, None);
            sink.push(&p, Some(i as u64), "symmetrized_deviation", *b, None);
        }
        let (ml, sl) = (stats::mean(&lhs), stats::std_error(&lhs));
        let (mr, sr) = (stats::mean(&rhs), stats::std_error(&rhs));
        sink.summary(&p, "mean_deviation", ml, Some(sl));
        sink.summary(&p, "mean_symmetrized_deviation", mr, Some(sr));
        let slack = 3.0 * sl.hypot(2.0 * sr);
        if ml > 2.0 * mr + slack {
            expectation_fail += 1;
        }
        sink.summary(&p, "expectation_gap", 2.0 * mr - ml, Some(sl.hypot(2.0 * sr)));
        for &eps in &cfg.epsilon_grid {
            let p = [("n", n as f64), ("epsilon", eps)];
            let rr = lhs.len() as f64;
            let pl = lhs.iter().filter(|&&x| x >= eps).count() as f64 / rr;
            let pr = rhs.iter().filter(|&&x| x >= eps / 4.0).count() as f64 / rr;
            let (el, er) = ((pl * (1.0 - pl) / rr).sqrt(), (pr * (1.0 - pr) / rr).sqrt());
            sink.summary(&p, "exceedance", pl, Some(el));
            sink.summary(&p, "symmetrized_exceedance", pr, Some(er));
            let pre = n as f64 >= 8.0 * sigma2 / (eps * eps);
            sink.summary(&p, "precondition", f64::from(u8::from(pre)), None);
            if !pre {
                probability_skipped += 1;
            } else if pl > 4.0 * pr + 3.0 * el.hypot(4.0 * er) {
                probability_fail += 1;
            }
        }
    }
    sink.summary(&[], "expectation_violations", expectation_fail as f64, None);
    sink.summary(&[], "probability_violations", probability_fail as f64, None);
    let checks = vec![
        Check::new(
            "expectation_inequality",
            expectation_fail == 0,
            format!("{expectation_fail} sample sizes with E dev > 2 E sym + 3 SE"),
        ),
        Check::new(
            "probability_inequality",
            probability_fail == 0,
            format!("{probability_fail} violations beyond 3 SE, {probability_skipped} (n, ε) below the sample-size condition"),
        ),
    ];
    Ok(Report {
        records: sink.records,
        checks,
        files: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ppdepth_core::measure::PointPattern;

    #[test]
    fn single_pattern_sign_is_irrelevant() {
        let p = PointPattern::from_flat(1, vec![0.2, 0.5, 0.9]).unwrap();
        let s = Sample::new(vec![p]).unwrap();
        let plus = symmetrized_sup(&s, &[true]).unwrap();
        let minus = symmetrized_sup(&s, &[false]).unwrap();
        // the half-line containing all three points
        assert_eq!(plus, 3.0);
        assert_eq!(minus, 3.0);
    }

    #[test]
    fn cancelling_signs() {
        let a = PointPattern::from_flat(1, vec![0.5]).unwrap();
        let s = Sample::new(vec![a.clone(), a]).unwrap();
        assert_eq!(symmetrized_sup(&s, &[true, false]).unwrap(), 0.0);
        assert_eq!(symmetrized_sup(&s, &[true, true]).unwrap(), 1.0);
    }
}
