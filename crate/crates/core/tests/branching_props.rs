use approx::assert_relative_eq;
use ppdepth_core::branching::{grow_tree, BrwTree, DEFAULT_VERTEX_CAP};
use ppdepth_core::generators::{CountLaw, DisplacementLaw, RngStream};
use ppdepth_core::measure::{empirical_intensity, pattern_integral, EvalFunction};
use proptest::prelude::*;
use rand::Rng;

fn law() -> impl Strategy<Value = CountLaw> {
    prop_oneof![
        (1u64..3).prop_map(|k| CountLaw::fixed(k).unwrap()),
        (0.0f64..1.5).prop_map(|l| CountLaw::shifted_poisson(l).unwrap()),
        Just(CountLaw::pmf(vec![0.0, 0.6, 0.3, 0.1]).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tree_invariants(count in law(), seed in any::<u64>(), depth in 1usize..7) {
        let disp = DisplacementLaw::gaussian(vec![0.0, 2.0], vec![1.0, 0.25]).unwrap();
        let t: BrwTree<f64> = grow_tree(&count, &disp, depth, &mut RngStream::new(seed, 0), 200_000).unwrap();
        let sizes = t.generation_sizes();
        prop_assert_eq!(sizes[0], 1);
        prop_assert_eq!(t.position(0), &[0.0, 0.0]);
        for j in 0..depth {
            let kids: usize = t.generation(j).map(|v| t.offspring(v).unwrap()).sum();
            prop_assert_eq!(kids, sizes[j + 1]);
        }
        for i in 1..t.len() {
            let p = t.parent(i).unwrap();
            prop_assert_eq!(t.generation_of(i), t.generation_of(p) + 1);
            for k in 0..2 {
                let want = t.position(p)[k] + t.displacement(i)[k];
                prop_assert!((t.position(i)[k] - want).abs() <= 1e-12 * t.generation_of(i) as f64 * want.abs().max(1.0));
            }
            prop_assert_eq!(t.find(&t.label(i)), Some(i));
        }
        let f = EvalFunction::half_space(ppdepth_core::measure::Point::new(vec![0.0, 2.0]).unwrap(), vec![1.0, 0.0]).unwrap();
        for j in 0..depth {
            let h = t.harris(j, &f).unwrap() * t.harris_count(j) as f64;
            let ln: f64 = (0..=j).map(|l| t.lotka_nagaev(l, &f).unwrap() * t.generation_size(l) as f64).sum();
            prop_assert!((h - ln).abs() <= 1e-12 * h.abs().max(1.0));
            let one = EvalFunction::Constant(1.0);
            prop_assert_eq!(t.lotka_nagaev(j, &one).unwrap(), sizes[j + 1] as f64 / sizes[j] as f64);
            let num: usize = sizes[1..=j + 1].iter().sum();
            let den: usize = sizes[..=j].iter().sum();
            prop_assert_eq!(t.harris(j, &one).unwrap(), num as f64 / den as f64);
            let s = t.generation_sample(j).unwrap();
            prop_assert_eq!(t.lotka_nagaev(j, &f).unwrap(), empirical_intensity(&s, &f).unwrap());
        }
    }

    #[test]
    fn fixed_counts_give_exact_means(k in 1u64..4, depth in 1usize..6) {
        let t: BrwTree<f64> = grow_tree(&CountLaw::fixed(k).unwrap(), &DisplacementLaw::unit_cube(1), depth, &mut RngStream::new(1, k), 100_000).unwrap();
        for j in 0..depth {
            prop_assert_eq!(t.lotka_nagaev(j, &EvalFunction::Constant(1.0)).unwrap(), k as f64);
            prop_assert_eq!(t.harris(j, &EvalFunction::Constant(1.0)).unwrap(), k as f64);
        }
    }
}

#[test]
fn vertex_patterns_match_counts() {
    let t: BrwTree<f64> = grow_tree(&CountLaw::shifted_poisson(1.0).unwrap(), &DisplacementLaw::unit_cube(1), 8, &mut RngStream::new(3, 3), DEFAULT_VERTEX_CAP).unwrap();
    let mut rng = RngStream::new(3, 4);
    let inner = t.generation(t.depth()).start;
    for _ in 0..100 {
        let v = rng.random_range(0..inner);
        let p = t.vertex_pattern(&t.label(v)).unwrap();
        assert_eq!(pattern_integral(p.view(), &EvalFunction::Constant(1.0)).unwrap(), t.offspring(v).unwrap() as f64);
    }
    let leaf = t.label(t.len() - 1);
    assert!(t.vertex_pattern(&leaf).is_err());
}

#[test]
fn mean_growth() {
    let reps = 10_000;
    let law = CountLaw::shifted_poisson(1.0).unwrap();
    let disp = DisplacementLaw::point_mass(vec![0.0]).unwrap();
    let sizes: Vec<f64> = (0..reps)
        .map(|r| grow_tree::<f64>(&law, &disp, 8, &mut RngStream::for_replicate(17, 8, r), DEFAULT_VERTEX_CAP).unwrap().generation_size(8) as f64)
        .collect();
    let mean = sizes.iter().sum::<f64>() / reps as f64;
    let var = sizes.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    let se = (var / reps as f64).sqrt();
    assert!((mean - 256.0).abs() <= 4.0 * se, "mean {mean}, se {se}");
}

#[test]
fn discrete_binary_walk_laplace_is_exact() {
    let disp = DisplacementLaw::point_mass(vec![0.5]).unwrap();
    let count = CountLaw::fixed(2).unwrap();
    let t: BrwTree<f64> = grow_tree(&count, &disp, 5, &mut RngStream::new(0, 0), 1000).unwrap();
    for theta in [-1.0, -0.25, 0.0, 0.7, 1.0] {
        let m = ppdepth_core::branching::true_laplace(&count, &disp, theta).unwrap();
        for j in 0..5 {
            let (a, b) = t.laplace_estimates(j, theta).unwrap();
            assert_relative_eq!(a, m, max_relative = 1e-15);
            assert_relative_eq!(b, m, max_relative = 1e-15);
        }
    }
}
