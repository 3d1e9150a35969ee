//! Identity suites comparing independent evaluators; the engine behind
//! `verify-identities`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::counting::{motzkin_number, motzkin_numbers};
use crate::error::Result;
use crate::grid::TimeGrid;
use crate::oracles::excursion::{
    alpha, alpha_integral, beta, beta_integral, excursion_fdd_density, excursion_laplace_direct, limit_laplace,
};
use crate::oracles::fbm::{
    chapman_kolmogorov, density_moment, fbm_joint_moment, fbm_joint_moment_quadrature, joint_pgf, transition_moment,
    FbmTimes,
};
use crate::oracles::semicircle::{
    level_pgf, level_pgf_enumeration, motzkin_growth_ratio, sulanke_coeffs, sulanke_evaluators,
};
use crate::path::enumerate_paths;
use crate::quadrature::{integrate_half_line, Tolerance};

/// One line of an identity report: the worst error seen for one identity at
/// one size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRecord {
    pub identity: &'static str,
    pub n: usize,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityRecord {
    fn new(identity: &'static str, n: usize, max_rel_err: f64, tolerance: f64) -> Self {
        IdentityRecord { identity, n, max_rel_err, tolerance, pass: max_rel_err <= tolerance }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityConfig {
    pub max_n: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        IdentityConfig { max_n: 10, trials: 20, seed: 1 }
    }
}

pub const SUITES: [&str; 9] = [
    "counts",
    "GenF0",
    "up2fBM",
    "free-Wick",
    "kernel",
    "Sulanke",
    "M-growth",
    "excursion",
    "limit-Laplace",
];

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn rng_for(config: &IdentityConfig, suite: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(config.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(suite))
}

/// Path enumeration count against `M_n` for `n <= min(max_n, 12)`.
pub fn counts_suite(config: &IdentityConfig) -> Result<Vec<IdentityRecord>> {
    let top = config.max_n.min(12);
    let m = motzkin_numbers(top)?;
    Ok((0..=top)
        .map(|n| {
            let c = enumerate_paths(n).count() as f64;
            IdentityRecord::new("counts", n, rel_err(c, m[n].to_f64()), 0.0)
        })
        .collect())
}

/// Level generating function: enumeration against semicircle quadrature, `u` in `[0.5, 2]^n`.
pub fn genf0_suite(config: &IdentityConfig) -> Result<Vec<IdentityRecord>> {
    let mut rng = rng_for(config, 1);
    Ok((1..=config.max_n.min(12))
        .map(|n| {
            let worst = (0..config.trials)
                .map(|_| {
                    let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
                    rel_err(level_pgf_enumeration(&u), level_pgf(&u))
                })
                .fold(0.0, f64::max);
            IdentityRecord::new("GenF0", n, worst, 1e-9)
        })
        .collect())
}

/// Ascent/level generating function: paths against the non-crossing moment
/// expansion, `t` nondecreasing in `[0.5, 2]`, `u` in `[0.5, 2]`.
pub fn up2fbm_suite(config: &IdentityConfig) -> Result<Vec<IdentityRecord>> {
    let mut rng = rng_for(config, 2);
    let mut out = Vec::new();
    for n in 1..=config.max_n.min(12) {
        let mut worst: f64 = 0.0;
        for _ in 0..config.trials {
            let mut t: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
            t.sort_by(f64::total_cmp);
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
            let r = joint_pgf(&FbmTimes::new(t)?, &u)?;
            worst = worst.max(r.rel_err);
        }
        out.push(IdentityRecord::new("up2fBM", n, worst, 1e-9));
    }
    Ok(out)
}

/// Non-crossing moment formula against nested density quadrature, `d <= 3`,
/// times in `[0.25, 4]`. Errors are absolute.
pub fn free_wick_suite(config: &IdentityConfig) -> Result<Vec<IdentityRecord>> {
    let mut rng = rng_for(config, 3);
    let trials = config.trials.min(10);
    let mut out = Vec::new();
    for d in 1..=3 {
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let mut t: Vec<f64> = (0..d).map(|_| rng.random_range(0.25..4.0)).collect();
            t.sort_by(f64::total_cmp);
            t.dedup();
            if t.len() < d {
                continue;
            }
            let times = FbmTimes::new(t)?;
            let exact = fbm_joint_moment(&times);
            let quad = fbm_joint_moment_quadrature(&times)?;
            worst = worst.max((exact - quad).abs());
            if d == 2 {
                worst = worst.max((exact - times.as_slice()[0]).abs());
            }
        }
        out.push(IdentityRecord::new("free-Wick", d, worst, 1e-6));
    }
    Ok(out)
}

/// Marginal and transition normalization (`1e-8`), the martingale property
/// and Chapman-Kolmogorov (`1e-6`), at random configurations.
pub fn kernel_suite(config: &IdentityConfig) -> Result<Vec<IdentityRecord>> {
    let mut rng = rng_for(config, 4);
    let trials = config.trials.clamp(1, 5);
    let mut norm: f64 = 0.0;
    for t in [0.25, 1.0, 4.0] {
        norm = norm.max((density_moment(t, 0)? - 1.0).abs());
        norm = norm.max((density_moment(t, 2)? - t).abs());
    }
    let mut mart: f64 = 0.0;
    let mut ck: f64 = 0.0;
    for _ in 0..trials {
        let s: f64 = rng.random_range(0.1..2.0);
        let t: f64 = s + rng.random_range(0.1..2.0);
        let u: f64 = t + rng.random_range(0.1..2.0);
        let x = rng.random_range(-0.95..0.95) * 2.0 * s.sqrt();
        let z = rng.random_range(-0.95..0.95) * 2.0 * u.sqrt();
        norm = norm.max((transition_moment(s, x, t, 0)? - 1.0).abs());
        mart = mart.max((transition_moment(s, x, t, 1)? - x).abs());
        let (lhs, rhs) = chapman_kolmogorov(s, x, t, u, z)?;
        ck = ck.max((lhs - rhs).abs());
    }
    Ok(vec![
        IdentityRecord::new("kernel-normalization", 0, norm, 1e-8),
        IdentityRecord::new("kernel-martingale", 0, mart, 1e-6),
        IdentityRecord::new("chapman-kolmogorov", 0, ck, 1e-6),
    ])
}

/// Three Sulanke evaluators at `t in {0.3, 1, 2.7}` for `n <= max_n`, and the
/// exact coefficients summing to `M_n` for `n <= 20`.
pub fn sulanke_suite(config: &IdentityConfig) -> Result<Vec<IdentityRecord>> {
    let mut out = Vec::new();
    for n in 0..=config.max_n.max(12) {
        let worst = [0.3, 1.0, 2.7].iter().map(|&t| sulanke_evaluators(n, t).max_rel_err).fold(0.0, f64::max);
        out.push(IdentityRecord::new("Sulanke", n, worst, 1e-9));
    }
    for n in 0..=20 {
        let coeffs = sulanke_coeffs(n)?;
        let sum = coeffs.iter().fold(crate::BigCount::zero(), |acc, c| &acc + c);
        let ok = sum == motzkin_number(n)?;
        out.push(IdentityRecord::new("Sulanke-at-one", n, if ok { 0.0 } else { 1.0 }, 0.0));
    }
    Ok(out)
}

pub fn growth_suite(_config: &IdentityConfig) -> Result<Vec<IdentityRecord>> {
    let r = motzkin_growth_ratio(1000)?;
    Ok(vec![IdentityRecord::new("M-growth", 1000, (r - 1.0).abs(), 0.01)])
}

/// Excursion density normalization for `d = 1, 2`, two-to-one marginal
/// consistency, and the closed-form kernels against their integrals.
pub fn excursion_suite(_config: &IdentityConfig) -> Result<Vec<IdentityRecord>> {
    let tol = Tolerance::new(1e-13, 1e-11);
    let g1 = TimeGrid::new(vec![0.5])?;
    let mass1 = integrate_half_line(|x| excursion_fdd_density(&g1, &[x]).unwrap_or(0.0), 0.5, tol)?;
    let g2 = TimeGrid::new(vec![0.3, 0.65])?;
    let mass2 = excursion_laplace_direct(&g2, &[0.0, 0.0, 0.0])?;
    let g0 = TimeGrid::new(vec![0.3])?;
    let mut marg: f64 = 0.0;
    for i in 1..=10 {
        let x1 = 0.15 * i as f64;
        let m = integrate_half_line(|x2| excursion_fdd_density(&g2, &[x1, x2]).unwrap_or(0.0), 0.5, tol)?;
        marg = marg.max((m - excursion_fdd_density(&g0, &[x1])?).abs());
    }
    let mut kernels: f64 = 0.0;
    for &(s, x, y) in &[(0.5, 0.4, 0.6), (0.2, 0.1, 0.25), (0.8, 1.3, 0.3), (0.35, 0.9, 0.9)] {
        kernels = kernels.max((alpha(s, x) - alpha_integral(s, x)?).abs());
        kernels = kernels.max((beta(s, x, y) - beta_integral(s, x, y)?).abs());
    }
    Ok(vec![
        IdentityRecord::new("excursion-normalization", 1, (mass1 - 1.0).abs(), 1e-6),
        IdentityRecord::new("excursion-normalization", 2, (mass2 - 1.0).abs(), 1e-6),
        IdentityRecord::new("excursion-marginal", 2, marg, 1e-6),
        IdentityRecord::new("alpha-beta-closed-form", 0, kernels, 1e-9),
    ])
}

/// Limit transform built from the closed-form kernels against direct
/// excursion quadrature, `d = 1, 2`.
pub fn limit_laplace_suite(config: &IdentityConfig) -> Result<Vec<IdentityRecord>> {
    let mut rng = rng_for(config, 8);
    let mut out = Vec::new();
    for d in 1..=2usize {
        let mut worst: f64 = 0.0;
        for _ in 0..config.trials.clamp(1, 3) {
            let mut s: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..0.9)).collect();
            s.sort_by(f64::total_cmp);
            if s.windows(2).any(|w| w[1] - w[0] < 0.05) {
                continue;
            }
            let grid = TimeGrid::new(s)?;
            let mut z: Vec<f64> = (0..=d).map(|_| rng.random_range(0.0..2.0)).collect();
            z.sort_by(f64::total_cmp);
            let w = vec![0.0; d + 1];
            let a = limit_laplace(&grid, &z, &w)?;
            let b = excursion_laplace_direct(&grid, &z)?;
            worst = worst.max((a - b).abs());
        }
        out.push(IdentityRecord::new("limit-Laplace", d, worst, 1e-8));
    }
    Ok(out)
}

pub fn run_suite(name: &str, config: &IdentityConfig) -> Option<Result<Vec<IdentityRecord>>> {
    Some(match name {
        "counts" => counts_suite(config),
        "GenF0" => genf0_suite(config),
        "up2fBM" => up2fbm_suite(config),
        "free-Wick" => free_wick_suite(config),
        "kernel" => kernel_suite(config),
        "Sulanke" => sulanke_suite(config),
        "M-growth" => growth_suite(config),
        "excursion" => excursion_suite(config),
        "limit-Laplace" => limit_laplace_suite(config),
        _ => return None,
    })
}

pub fn run_all(config: &IdentityConfig) -> Result<Vec<IdentityRecord>> {
    let mut out = Vec::new();
    for name in SUITES {
        out.extend(run_suite(name, config).expect("known suite")?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_config_passes() {
        let config = IdentityConfig { max_n: 6, trials: 3, seed: 5 };
        for name in ["counts", "GenF0", "up2fBM", "Sulanke", "M-growth"] {
            let recs = run_suite(name, &config).unwrap().unwrap();
            assert!(!recs.is_empty());
            for r in recs {
                assert!(r.pass, "{r:?}");
            }
        }
        assert!(run_suite("nope", &config).is_none());
    }
}
