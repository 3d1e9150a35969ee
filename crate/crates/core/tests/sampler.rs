use std::collections::HashMap;

use motzkin::path::enumerate_paths;
use motzkin::sampler::{sample_many, SamplerConfig, SamplerMode, UniformSampler};
use motzkin::stats::{chi_square_two_sample, chi_square_uniformity};

const ALPHA: f64 = 0.001;
const MODES: [SamplerMode; 3] = [SamplerMode::CycleLemma, SamplerMode::DpExact, SamplerMode::DpLogspace];

fn histogram(n: usize, mode: SamplerMode, seed: u64, draws: usize) -> Vec<u64> {
    let index: HashMap<String, usize> = enumerate_paths(n).enumerate().map(|(i, p)| (p.to_text(), i)).collect();
    let mut counts = vec![0u64; index.len()];
    for p in sample_many(&SamplerConfig::new(n, mode, seed), draws, 4) {
        counts[index[&p.to_text()]] += 1;
    }
    counts
}

#[test]
fn every_mode_is_uniform_for_small_n() {
    for n in 2..=7 {
        let cells = enumerate_paths(n).count();
        let draws = 2000 * cells;
        for (k, mode) in MODES.into_iter().enumerate() {
            let counts = histogram(n, mode, 1000 + 10 * n as u64 + k as u64, draws);
            let test = chi_square_uniformity(&counts, &vec![2000.0; cells]).unwrap();
            assert!(test.p_value > ALPHA, "n = {n}, {mode:?}: {test:?}");
        }
    }
}

#[test]
fn cycle_lemma_and_dp_agree_for_small_n() {
    for n in 2..=7 {
        let draws = 2000 * enumerate_paths(n).count();
        let a = histogram(n, SamplerMode::CycleLemma, 7 * n as u64, draws);
        let b = histogram(n, SamplerMode::DpExact, 7 * n as u64 + 1, draws);
        let test = chi_square_two_sample(&a, &b).unwrap();
        assert!(test.p_value > ALPHA, "n = {n}: {test:?}");
    }
}

#[test]
fn log_space_probabilities_match_exact() {
    for n in [1, 2, 17, 64, 200] {
        let exact = UniformSampler::new(n, SamplerMode::DpExact);
        let log = UniformSampler::new(n, SamplerMode::DpLogspace);
        for m in 0..n {
            for h in 0..=(n - m).min(m) {
                let (Some(e), Some(l)) = (exact.step_probabilities(m, h), log.step_probabilities(m, h)) else {
                    assert!(exact.step_probabilities(m, h).is_none() && log.step_probabilities(m, h).is_none());
                    continue;
                };
                for i in 0..3 {
                    let rel = (e[i] - l[i]).abs() / e[i].max(f64::MIN_POSITIVE);
                    assert!(e[i] == l[i] || rel <= 1e-10, "n = {n}, m = {m}, h = {h}: {e:?} vs {l:?}");
                }
            }
        }
    }
}

#[test]
fn outputs_are_valid_and_seed_determined() {
    for mode in MODES {
        for n in [0, 1, 5, 123, 1000] {
            let config = SamplerConfig::new(n, mode, 77);
            let a = sample_many(&config, 40, 3);
            assert_eq!(a, sample_many(&config, 40, 3));
            assert_eq!(a.len(), 40);
            for p in &a {
                assert_eq!(p.len(), n);
                motzkin::path::validate(p.steps().to_vec()).unwrap();
            }
            if n > 5 {
                assert_ne!(a, sample_many(&SamplerConfig::new(n, mode, 78), 40, 3));
            }
        }
    }
}
