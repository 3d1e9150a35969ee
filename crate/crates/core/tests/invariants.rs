use proptest::prelude::*;

use motzkin::counting::{catalan, meander_table, motzkin_by_binomial_sum, motzkin_by_convolution, motzkin_number};
use motzkin::fluctuation::{nonlevel_decomposition_check, scaled_fluctuations};
use motzkin::partition::{enumerate_nc2, is_noncrossing, partition_to_path, path_to_partition};
use motzkin::path::{counting_processes, enumerate_paths, validate, MotzkinPath, Step};
use motzkin::quadrature::build_quadrature;
use motzkin::sampler::{RandomSource, SamplerMode, UniformSampler};
use motzkin::TimeGrid;

fn random_path(n: usize, seed: u64) -> MotzkinPath {
    UniformSampler::new(n, SamplerMode::CycleLemma).sample(&mut RandomSource::from_seed(seed))
}

fn step() -> impl Strategy<Value = Step> {
    prop_oneof![Just(Step::Ascent), Just(Step::Level), Just(Step::Descent)]
}

fn grid() -> impl Strategy<Value = TimeGrid> {
    prop::collection::btree_set(1u32..1000, 1..5)
        .prop_map(|s| TimeGrid::new(s.into_iter().map(|k| k as f64 / 1000.0).collect()).unwrap())
}

#[test]
fn enumeration_matches_counts_and_paths_are_balanced() {
    for n in 0..=12 {
        let mut count = 0u64;
        for p in enumerate_paths(n) {
            validate(p.steps().to_vec()).unwrap();
            let c = counting_processes(&p, 1.0).unwrap();
            assert_eq!(c.ascents, c.descents);
            assert_eq!(c.ascents + c.descents + c.levels, n);
            count += 1;
        }
        assert_eq!(motzkin_number(n).unwrap(), count, "n = {n}");
    }
}

#[test]
fn partition_round_trip_up_to_10() {
    for n in 0..=10 {
        for p in enumerate_paths(n) {
            let part = path_to_partition(&p);
            assert!(is_noncrossing(&part));
            assert_eq!(partition_to_path(n, &part).unwrap(), p);
        }
    }
}

#[test]
fn meander_row_zero_is_motzkin_up_to_200() {
    let w = meander_table(200);
    for n in 0..=200 {
        assert_eq!(w.get(n, 0), motzkin_number(n).unwrap(), "n = {n}");
    }
}

#[test]
fn binomial_sum_matches_convolution_up_to_500() {
    let conv = motzkin_by_convolution(500);
    for n in 0..=500u64 {
        assert_eq!(motzkin_by_binomial_sum(n), conv[n as usize], "n = {n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nc2_counts_are_catalan(support in prop::collection::btree_set(1usize..40, 0..=10)) {
        let mut support: Vec<usize> = support.into_iter().collect();
        if support.len() % 2 == 1 {
            support.pop();
        }
        let all: Vec<_> = enumerate_nc2(&support).unwrap().collect();
        prop_assert_eq!(catalan(support.len() as u64 / 2), all.len() as u64);
        for p in &all {
            prop_assert!(is_noncrossing(p));
            prop_assert_eq!(p.support(), &support[..]);
        }
    }

    #[test]
    fn validation_agrees_with_prefix_sums(steps in prop::collection::vec(step(), 0..40)) {
        let mut h = 0i64;
        let mut first_negative = None;
        for (i, s) in steps.iter().enumerate() {
            h += s.value() as i64;
            if h < 0 && first_negative.is_none() {
                first_negative = Some(i + 1);
            }
        }
        let r = validate(steps.clone());
        match (first_negative, h) {
            (None, 0) => prop_assert_eq!(r.unwrap().into_steps(), steps),
            (Some(i), _) => prop_assert_eq!(r.unwrap_err(), motzkin::Error::PrefixNegative(i)),
            (None, end) => prop_assert_eq!(r.unwrap_err(), motzkin::Error::NonzeroEndpoint(end)),
        }
    }

    #[test]
    fn text_and_json_round_trip(n in 0usize..200, seed: u64) {
        let p = random_path(n, seed);
        prop_assert_eq!(&p.to_text().parse::<MotzkinPath>().unwrap(), &p);
        let json = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(&serde_json::from_str::<MotzkinPath>(&json).unwrap(), &p);
        prop_assert_eq!(partition_to_path(n, &path_to_partition(&p)).unwrap(), p);
    }

    #[test]
    fn quadrature_is_exact_on_low_degree(nodes in 1usize..30, coeffs in prop::collection::vec(-1.0f64..1.0, 60)) {
        let q = build_quadrature(nodes);
        let c = &coeffs[..2 * nodes];
        let poly = |y: f64| c.iter().rev().fold(0.0, |acc, &a| acc * y + a);
        let exact: f64 = c
            .iter()
            .enumerate()
            .filter(|(m, _)| m % 2 == 0)
            .map(|(m, &a)| a * catalan(m as u64 / 2).to_f64())
            .sum();
        let scale: f64 = c
            .iter()
            .enumerate()
            .map(|(m, a)| a.abs() * 2f64.powi(m as i32))
            .sum::<f64>()
            .max(1.0);
        prop_assert!((q.integrate(poly) - exact).abs() <= 1e-12 * scale, "{} vs {}", q.integrate(poly), exact);
    }

    #[test]
    fn fluctuation_triple_sums_to_zero(n in 1usize..600, seed: u64, grid in grid()) {
        let p = random_path(n, seed);
        let v = scaled_fluctuations(&p, &grid);
        for t in &v.triple {
            prop_assert_eq!(t[0] + t[1] + t[2], 0.0);
        }
        prop_assert!(nonlevel_decomposition_check(&p, &grid));
    }

    #[test]
    fn f_at_one_is_pinned(n in 1usize..600, seed: u64) {
        let p = random_path(n, seed);
        let end = TimeGrid::closed(vec![1.0]).unwrap();
        let v = scaled_fluctuations(&p, &end);
        prop_assert!(v.f[0].abs() <= 2.0 / (2.0 * n as f64).sqrt());
    }
}
