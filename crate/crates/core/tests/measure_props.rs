use approx::assert_relative_eq;
use ppdepth_core::generators::{reference_for, sample_sample, Atom, CountLaw, DisplacementLaw, RngStream};
use ppdepth_core::measure::{
    covariance_hat, empirical_intensity, empirical_pseudo_distance, reference_mass, sup_deviation, EvalFunction,
    FunctionClass, PointPattern, ReferenceMeasure, Sample,
};
use proptest::prelude::*;

fn sample_1d() -> impl Strategy<Value = Sample<f64>> {
    prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 1..5), 1..12).prop_map(|ps| {
        Sample::new(ps.into_iter().map(|p| PointPattern::from_flat(1, p).unwrap()).collect()).unwrap()
    })
}

fn function_1d() -> impl Strategy<Value = EvalFunction<f64>> {
    prop_oneof![
        (-2.5f64..2.5).prop_map(EvalFunction::below),
        (-2.5f64..2.5).prop_map(EvalFunction::above),
        (-1.5f64..1.5).prop_map(|t| EvalFunction::exponential(t, -2.0, 2.0).unwrap()),
        (-3.0f64..3.0).prop_map(EvalFunction::Constant),
    ]
}

fn exponent(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn norm_comparison(s in sample_1d(), f in function_1d(), g in function_1d()) {
        for (p, q) in [(1.0, 2.0), (1.0, f64::INFINITY), (2.0, f64::INFINITY), (1.5, 3.0)] {
            let lhs = empirical_pseudo_distance(&s, &f, &g, p).unwrap();
            let rhs = s.ratio().powf(exponent(p) - exponent(q)) * empirical_pseudo_distance(&s, &f, &g, q).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-10) + 1e-300, "p={p} q={q}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn pseudo_metric(s in sample_1d(), f in function_1d(), g in function_1d(), h in function_1d(), p in prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY), 1.0f64..4.0]) {
        let d = |a: &EvalFunction<f64>, b: &EvalFunction<f64>| empirical_pseudo_distance(&s, a, b, p).unwrap();
        prop_assert_eq!(d(&f, &f), 0.0);
        prop_assert!(d(&f, &g) >= 0.0);
        prop_assert_eq!(d(&f, &g), d(&g, &f));
        prop_assert!(d(&f, &h) <= (d(&f, &g) + d(&g, &h)) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn constant_intensity(s in sample_1d(), c in -5.0f64..5.0) {
        let v = empirical_intensity(&s, &EvalFunction::Constant(c)).unwrap();
        prop_assert!((v - c * s.ratio()).abs() <= 1e-12 * s.s_n() as f64 * c.abs().max(1.0));
        prop_assert_eq!(empirical_intensity(&s, &EvalFunction::Constant(1.0)).unwrap(), s.ratio());
    }

    #[test]
    fn variance_is_nonnegative(s in sample_1d(), f in function_1d()) {
        if s.n() >= 2 {
            prop_assert!(covariance_hat(&s, &f, &f).unwrap() >= 0.0);
        }
    }

    #[test]
    fn self_reference_has_zero_deviation(s in sample_1d()) {
        let r = ReferenceMeasure::empirical(s.clone());
        prop_assert_eq!(sup_deviation(&s, &FunctionClass::half_lines(), &r).unwrap().value, 0.0);
        let e = FunctionClass::exponentials(-2.0, 2.0, 1.0).unwrap();
        prop_assert!(sup_deviation(&s, &e, &r).unwrap().value <= 1e-12);
    }

    #[test]
    fn half_line_sup_matches_brute_force_on_atoms(s in sample_1d(), atoms in prop::collection::vec((-2.0f64..2.0, 0.05f64..1.0), 1..6), l in 1u64..4) {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let disp = DisplacementLaw::discrete(atoms.iter().map(|&(x, w)| Atom { point: vec![x], weight: w / total }).collect()).unwrap();
        let r = reference_for(&CountLaw::fixed(l).unwrap(), &disp).unwrap();
        let sup = sup_deviation(&s, &FunctionClass::half_lines(), &r).unwrap().value;
        let brute = brute_half_lines(&s, &r, atoms.iter().map(|a| a.0));
        prop_assert!((sup - brute).abs() <= 1e-12 * sup.max(1.0), "sup {sup} brute {brute}");
    }

    #[test]
    fn half_line_sup_dominates_brute_force_on_uniform(s in sample_1d()) {
        let r = reference_for(&CountLaw::fixed(1).unwrap(), &DisplacementLaw::uniform(vec![-2.0], vec![2.0]).unwrap()).unwrap();
        let sup = sup_deviation(&s, &FunctionClass::half_lines(), &r).unwrap().value;
        let brute = brute_half_lines(&s, &r, std::iter::empty());
        prop_assert!(brute <= sup + 1e-12);
    }
}

/// Max of `|μ_n(f) - μ(f)|` over closed half-lines of both orientations at the
/// sorted data points (and extra locations), their midpoints and one point beyond each end.
fn brute_half_lines(s: &Sample<f64>, r: &ReferenceMeasure<f64>, extra: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = s.flat().iter().copied().chain(extra).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    let mut cands = vec![v[0] - 1.0, v[v.len() - 1] + 1.0];
    cands.extend(v.iter().copied());
    cands.extend(v.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let mut best: f64 = 0.0;
    for t in cands {
        for f in [EvalFunction::below(t), EvalFunction::above(t)] {
            best = best.max((empirical_intensity(s, &f).unwrap() - reference_mass(r, &f).unwrap()).abs());
        }
    }
    best
}

#[test]
fn ks_statistic_on_uniform_samples() {
    let r = reference_for(&CountLaw::fixed(1).unwrap(), &DisplacementLaw::unit_cube(1)).unwrap();
    for rep in 0..200 {
        let mut rng = RngStream::for_replicate(99, 0, rep);
        let s: Sample<f64> = sample_sample(50, &CountLaw::fixed(1).unwrap(), &DisplacementLaw::unit_cube(1), &mut rng).unwrap();
        let mut x = s.flat().to_vec();
        x.sort_by(f64::total_cmp);
        let n = x.len() as f64;
        let ks = x
            .iter()
            .enumerate()
            .map(|(i, &xi)| ((i + 1) as f64 / n - xi).max(xi - i as f64 / n))
            .fold(0.0, f64::max);
        let sup = sup_deviation(&s, &FunctionClass::half_lines(), &r).unwrap().value;
        assert!((sup - ks).abs() <= 1e-12, "rep {rep}: {sup} vs {ks}");
    }
}

#[test]
fn spec_examples() {
    let y = PointPattern::from_flat(1, vec![0.5, 1.0]).unwrap();
    let e = ppdepth_core::measure::pattern_integral(y.view(), &EvalFunction::exponential(1.0, 0.0, 1.0).unwrap()).unwrap();
    assert_relative_eq!(e, 0.5f64.exp() + 1.0f64.exp(), max_relative = 1e-15);
    let s = Sample::new(vec![
        PointPattern::from_flat(1, vec![0.1]).unwrap(),
        PointPattern::from_flat(1, vec![0.6, 0.7]).unwrap(),
    ])
    .unwrap();
    assert_eq!(empirical_intensity(&s, &EvalFunction::below(0.5)).unwrap(), 0.5);
    let one = EvalFunction::Constant(1.0);
    let zero = EvalFunction::Constant(0.0);
    assert_eq!(empirical_pseudo_distance(&s, &one, &zero, f64::INFINITY).unwrap(), 1.0);
    assert_eq!(empirical_pseudo_distance(&s, &one, &zero, 1.0).unwrap(), 1.5);
    assert!(empirical_pseudo_distance(&s, &one, &zero, 0.5).is_err());
    let t3 = |v: [f64; 3]| EvalFunction::tabulated(1, vec![(vec![0.1], v[0]), (vec![0.6], v[1]), (vec![0.7], v[2])]).unwrap();
    let s3 = Sample::from_scalars(&[0.1, 0.6, 0.7]).unwrap();
    assert_eq!(covariance_hat(&s3, &t3([1.0, 2.0, 3.0]), &t3([3.0, 2.0, 1.0])).unwrap(), -1.0);
    let point = ReferenceMeasure::point_mass(vec![0.0], 1.0).unwrap();
    let s0 = Sample::from_scalars(&[0.0]).unwrap();
    assert_eq!(sup_deviation(&s0, &FunctionClass::half_lines(), &point).unwrap().value, 0.0);
}

#[test]
fn half_plane_sup_self_reference() {
    let mut rng = RngStream::new(4, 4);
    let s: Sample<f64> = sample_sample(30, &CountLaw::shifted_poisson(1.0).unwrap(), &DisplacementLaw::unit_cube(2), &mut rng).unwrap();
    let r = ReferenceMeasure::empirical(s.clone());
    assert_eq!(sup_deviation(&s, &FunctionClass::half_spaces(2).unwrap(), &r).unwrap().value, 0.0);
}
