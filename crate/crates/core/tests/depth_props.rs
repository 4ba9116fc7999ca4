use ppdepth_core::depth::{
    deepest_point, depth_1d, depth_2d_exact, depth_approx, depth_oracle, depth_sup_deviation, halfspace_mass,
    WeightedPoints,
};
use ppdepth_core::generators::{reference_for, sample_sample, CountLaw, DisplacementLaw, RngStream};
use ppdepth_core::measure::{sup_deviation, FunctionClass, Point, ReferenceMeasure, Sample};
use proptest::prelude::*;

fn integer_config() -> impl Strategy<Value = (WeightedPoints<f64>, [f64; 2])> {
    (
        prop::collection::vec(((-4i32..=4), (-4i32..=4), 1u32..4), 1..14),
        (-4i32..=4, -4i32..=4),
    )
        .prop_map(|(pts, x)| {
            let coords = pts.iter().flat_map(|&(a, b, _)| [a as f64, b as f64]).collect();
            let w = pts.iter().map(|p| p.2 as f64).collect();
            (WeightedPoints::new(2, coords, w).unwrap(), [x.0 as f64, x.1 as f64])
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_depth_matches_oracle((wp, x) in integer_config()) {
        let e = depth_2d_exact(&wp, &x).unwrap();
        prop_assert_eq!(e.depth, depth_oracle(&wp, &x).unwrap());
        let u = &e.direction;
        prop_assert_eq!(ppdepth_core::depth::weighted_halfspace_mass(&wp, &x, u).unwrap(), e.depth);
    }

    #[test]
    fn depth_scales_with_mass((wp, x) in integer_config(), c in prop_oneof![Just(0.5), Just(2.0), Just(3.0)]) {
        let a = depth_2d_exact(&wp, &x).unwrap().depth;
        let b = depth_2d_exact(&wp.rescaled(c).unwrap(), &x).unwrap().depth;
        prop_assert!((b - c * a).abs() <= 1e-12 * (1.0 + b));
    }

    #[test]
    fn approx_is_an_upper_bound((wp, x) in integer_config()) {
        let e = depth_2d_exact(&wp, &x).unwrap().depth;
        let r = atoms(&wp);
        prop_assert!(depth_approx(&r, &x, 32).unwrap().depth >= e - 1e-12);
    }

    #[test]
    fn depth_outside_hull_is_zero((wp, _x) in integer_config()) {
        prop_assert_eq!(depth_2d_exact(&wp, &[10.0, 0.5]).unwrap().depth, 0.0);
    }
}

fn atoms(wp: &WeightedPoints<f64>) -> ReferenceMeasure<f64> {
    use ppdepth_core::generators::Atom;
    let raw: f64 = (0..wp.len()).map(|i| wp.weight(i)).sum();
    let law = DisplacementLaw::discrete(
        (0..wp.len())
            .map(|i| Atom { point: wp.point(i).to_vec(), weight: wp.weight(i) / raw })
            .collect(),
    )
    .unwrap();
    ReferenceMeasure::mixed_binomial(wp.total_mass(), wp.total_mass().powi(2), law).unwrap()
}

#[test]
fn three_dimensional_oracle_agrees_with_sampling() {
    let mut rng = RngStream::new(8, 8);
    let s: Sample<f64> = sample_sample(12, &CountLaw::fixed(1).unwrap(), &DisplacementLaw::unit_cube(3), &mut rng).unwrap();
    let wp = WeightedPoints::from_sample(&s);
    let r = ReferenceMeasure::empirical(s);
    let x = [0.5, 0.5, 0.5];
    let o = depth_oracle(&wp, &x).unwrap();
    let a = depth_approx(&r, &x, 4096).unwrap().depth;
    assert!(a >= o);
    assert!(o > 0.0);
}

#[test]
fn depth_deviation_is_dominated_by_ks() {
    let r = reference_for(&CountLaw::fixed(1).unwrap(), &DisplacementLaw::unit_cube(1)).unwrap();
    let grid: Vec<Point<f64>> = (0..=20).map(|i| Point::new(vec![i as f64 / 20.0]).unwrap()).collect();
    for rep in 0..50 {
        let mut rng = RngStream::for_replicate(1, 2, rep);
        let s: Sample<f64> = sample_sample(40, &CountLaw::fixed(1).unwrap(), &DisplacementLaw::unit_cube(1), &mut rng).unwrap();
        let dd = depth_sup_deviation(&s, &r, &grid).unwrap();
        let ks = sup_deviation(&s, &FunctionClass::half_lines(), &r).unwrap().value;
        assert!(dd <= ks + 1e-12, "rep {rep}: {dd} > {ks}");
    }
}

#[test]
fn square_deepest_point_is_central() {
    let r: ReferenceMeasure<f64> = reference_for(&CountLaw::fixed(1).unwrap(), &DisplacementLaw::unit_cube(2)).unwrap();
    let (x, d) = deepest_point(&r, &[0.0, 0.0], &[1.0, 1.0], 11).unwrap();
    assert!((x.coords()[0] - 0.5).abs() < 1e-6 && (x.coords()[1] - 0.5).abs() < 1e-6);
    assert!((d - 0.5).abs() < 1e-9);
    assert!(halfspace_mass(&r, &[2.0, 2.0], &[-1.0, 0.0]).unwrap() == 0.0);
    let u1 = reference_for(&CountLaw::fixed(1).unwrap(), &DisplacementLaw::unit_cube(1)).unwrap();
    assert_eq!(depth_1d(&u1, 1.5).unwrap().depth, 0.0);
}

#[test]
fn gaussian_center_depth() {
    let r: ReferenceMeasure<f64> = reference_for(
        &CountLaw::shifted_poisson(2.0).unwrap(),
        &DisplacementLaw::gaussian(vec![1.0, -1.0, 0.0], vec![1.0, 1.0, 4.0]).unwrap(),
    )
    .unwrap();
    let d = depth_approx(&r, &[1.0, -1.0, 0.0], 4096).unwrap().depth;
    assert!((d - 1.5).abs() <= 0.03);
}
