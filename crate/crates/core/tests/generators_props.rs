use ppdepth_core::generators::{
    count_moments, cox_pmf, reference_for, sample_count, sample_pattern, sample_sample, Atom, CountLaw,
    DisplacementLaw, Mixing, RngStream,
};
use ppdepth_core::measure::{EvalFunction, Sample};
use proptest::prelude::*;

fn laws() -> Vec<CountLaw> {
    vec![
        CountLaw::fixed(3).unwrap(),
        CountLaw::shifted_poisson(0.0).unwrap(),
        CountLaw::shifted_poisson(2.0).unwrap(),
        CountLaw::cox(Mixing::point(1.0)).unwrap(),
        CountLaw::cox(Mixing::Discrete { atoms: vec![(0.5, 0.3), (4.0, 0.5), (40.0, 0.2)] }).unwrap(),
        CountLaw::cox(Mixing::LogNormal { m: 0.5, s: 0.4 }).unwrap(),
        CountLaw::pmf(vec![0.0, 0.2, 0.5, 0.3]).unwrap(),
    ]
}

#[test]
fn draws_match_moments() {
    for (i, law) in laws().iter().enumerate() {
        let mut rng = RngStream::new(2024, i as u64);
        let n = 1_000_000;
        let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let l = sample_count(law, &mut rng);
            assert!(l >= 1, "{law:?} drew 0");
            let x = l as f64;
            s1 += x;
            s2 += x * x;
            s4 += x * x * x * x;
        }
        let nf = n as f64;
        let m = count_moments(law);
        let (m1, m2) = (s1 / nf, s2 / nf);
        let se1 = ((m2 - m1 * m1) / nf).sqrt();
        let se2 = ((s4 / nf - m2 * m2) / nf).sqrt();
        assert!((m1 - m.mean).abs() <= 4.0 * se1 + 1e-12, "{law:?}: mean {m1} vs {}", m.mean);
        assert!((m2 - m.second_moment).abs() <= 4.0 * se2 + 1e-12, "{law:?}: second {m2} vs {}", m.second_moment);
    }
}

#[test]
fn cox_point_mixing_pmf_matches_draws() {
    let mix = Mixing::point(1.0);
    let law = CountLaw::cox(mix.clone()).unwrap();
    let mut rng = RngStream::new(5, 5);
    let n = 1_000_000;
    let mut hist = [0u64; 12];
    for _ in 0..n {
        let k = sample_count(&law, &mut rng) as usize;
        hist[k.min(11)] += 1;
    }
    for (k, &h) in hist.iter().enumerate().take(8).skip(1) {
        let p = cox_pmf(k as u64, &mix).unwrap();
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((h as f64 / n as f64 - p).abs() <= 4.0 * se, "k={k}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cox_pmf_normalizes(atoms in prop::collection::vec((0.01f64..60.0, 0.01f64..1.0), 1..5)) {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let mix = Mixing::Discrete { atoms: atoms.iter().map(|&(t, w)| (t, w / total)).collect() };
        let mut sum = 0.0;
        let mut k = 1;
        loop {
            let p = cox_pmf(k, &mix).unwrap();
            sum += p;
            if k > 200 && p < 1e-16 {
                break;
            }
            k += 1;
        }
        prop_assert!((sum - 1.0).abs() <= 1e-10, "sum {sum}");
    }

    #[test]
    fn streams_are_reproducible(seed in any::<u64>(), idx in any::<u64>()) {
        let law = CountLaw::shifted_poisson(2.0).unwrap();
        let d = DisplacementLaw::gaussian(vec![0.0, 1.0], vec![1.0, 0.5]).unwrap();
        let a: Sample<f64> = sample_sample(5, &law, &d, &mut RngStream::new(seed, idx)).unwrap();
        let b: Sample<f64> = sample_sample(5, &law, &d, &mut RngStream::new(seed, idx)).unwrap();
        prop_assert_eq!(a.flat().iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.flat().iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        prop_assert_eq!(a.offsets(), b.offsets());
    }
}

#[test]
fn sampler_examples() {
    let mut rng = RngStream::new(1, 2);
    let origin = DisplacementLaw::discrete(vec![Atom { point: vec![0.0, 0.0], weight: 1.0 }]).unwrap();
    let p = sample_pattern::<f64>(&CountLaw::fixed(1).unwrap(), &origin, &mut rng);
    assert_eq!(p.flat(), &[0.0, 0.0]);
    let p = sample_pattern::<f64>(&CountLaw::fixed(5).unwrap(), &DisplacementLaw::unit_cube(3), &mut rng);
    assert_eq!(p.len(), 5);
    let s: Sample<f64> = sample_sample(10, &CountLaw::fixed(2).unwrap(), &DisplacementLaw::unit_cube(1), &mut rng).unwrap();
    assert_eq!((s.s_n(), s.s_n2()), (20, 40));
    assert!(sample_sample::<f64>(0, &CountLaw::fixed(2).unwrap(), &DisplacementLaw::unit_cube(1), &mut rng).is_err());

    let mut total = 0u64;
    let law = CountLaw::shifted_poisson(2.0).unwrap();
    let n = 100_000;
    for _ in 0..n {
        total += sample_pattern::<f64>(&law, &DisplacementLaw::unit_cube(1), &mut rng).len() as u64;
    }
    let se = (2.0f64 / n as f64).sqrt();
    assert!((total as f64 / n as f64 - 3.0).abs() <= 3.0 * se);
}

#[test]
fn reference_examples() {
    let u = DisplacementLaw::unit_cube(1);
    let r = reference_for(&CountLaw::fixed(3).unwrap(), &u).unwrap();
    assert_eq!(r.mass(&EvalFunction::below(0.5)).unwrap(), 1.5);
    let r = reference_for::<f64>(&CountLaw::cox(Mixing::point(1.0)).unwrap(), &u).unwrap();
    assert!((r.total_mass() - 1.0 / (1.0 - (-1.0f64).exp())).abs() < 1e-14);
    let m = count_moments(&CountLaw::shifted_poisson(1.0).unwrap());
    assert_eq!((m.mean, m.second_moment), (2.0, 5.0));
}
