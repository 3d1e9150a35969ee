//! Scaled fluctuation statistics of the counting processes, their limit
//! moments, and the Monte Carlo experiment comparing the two.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::counting::{meander_row, motzkin_number};
use crate::error::{domain, Result};
use crate::grid::{floor_index, TimeGrid};
use crate::oracles::excursion::{excursion_cross_moment, excursion_marginal_moments, ExcursionMarginalCdf};
use crate::path::{MotzkinPath, Step};
use crate::sampler::{worker_quotas, RandomSource, SamplerMode, UniformSampler};
use crate::stats::{ks_distance, merge_all, MomentAccumulator};

/// `(F, G)` at each grid time with the `(A, L, D)` fluctuation triple
/// `(F/2 - G/6, G/3, -F/2 - G/6)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluctuationVector {
    pub grid: TimeGrid,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub triple: Vec<[f64; 3]>,
}

/// `(F/2 - G/6, G/3, -F/2 - G/6)`. The last component is formed as the
/// negated sum of the first two, so `t[0] + t[1] + t[2]` is exactly zero.
pub fn triple_from(f: f64, g: f64) -> [f64; 3] {
    let (a, b) = (f / 2.0 - g / 6.0, g / 3.0);
    [a, b, -(a + b)]
}

/// Ascent and level counts among the first `floor(n s)` steps for each grid
/// time, in one pass.
fn prefix_counts(path: &MotzkinPath, grid: &TimeGrid) -> Vec<(usize, usize, usize)> {
    let n = path.len();
    let steps = path.steps();
    let mut out = Vec::with_capacity(grid.d());
    let (mut a, mut l, mut pos) = (0usize, 0usize, 0usize);
    for &s in grid.times() {
        let m = floor_index(n, s);
        for &st in &steps[pos..m] {
            match st {
                Step::Ascent => a += 1,
                Step::Level => l += 1,
                Step::Descent => {}
            }
        }
        pos = m;
        out.push((m, a, l));
    }
    out
}

/// `F(s) = (2 A + L - floor(n s)) / sqrt(2n)`, `G(s) = (3 L - floor(n s)) / sqrt(2n)`.
/// The grid may include 0 and 1 (see [`TimeGrid::closed`]).
pub fn scaled_fluctuations(path: &MotzkinPath, grid: &TimeGrid) -> FluctuationVector {
    let root = (2.0 * path.len() as f64).sqrt();
    let mut f = Vec::with_capacity(grid.d());
    let mut g = Vec::with_capacity(grid.d());
    for (m, a, l) in prefix_counts(path, grid) {
        if path.is_empty() {
            f.push(0.0);
            g.push(0.0);
            continue;
        }
        f.push(((2 * a + l) as f64 - m as f64) / root);
        g.push((3.0 * l as f64 - m as f64) / root);
    }
    let triple = f.iter().zip(&g).map(|(&f, &g)| triple_from(f, g)).collect();
    FluctuationVector { grid: grid.clone(), f, g, triple }
}

/// Largest residual of the non-level decomposition
/// `(A - m/3)/sqrt(2n) = (A - J/2)/sqrt(J(1)) * sqrt(J(1)/(2n)) + (J - 2m/3)/(2 sqrt(2n))`
/// with `m = floor(n t)` and `J = m - L`. The middle term is skipped when
/// `J(1) = 0` (the all-level path).
pub fn nonlevel_decomposition_residual(path: &MotzkinPath, grid: &TimeGrid) -> f64 {
    let n = path.len();
    if n == 0 {
        return 0.0;
    }
    let root = (2.0 * n as f64).sqrt();
    let j1 = path.steps().iter().filter(|s| !s.is_level()).count() as f64;
    let mut worst: f64 = 0.0;
    for (m, a, l) in prefix_counts(path, grid) {
        let (m, a) = (m as f64, a as f64);
        let j = m - l as f64;
        let lhs = (a - m / 3.0) / root;
        let middle = if j1 > 0.0 { (a - j / 2.0) / j1.sqrt() * (j1 / (2.0 * n as f64)).sqrt() } else { 0.0 };
        let rhs = middle + (j - 2.0 * m / 3.0) / (2.0 * root);
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    worst
}

pub const DECOMPOSITION_TOLERANCE: f64 = 1e-12;

pub fn nonlevel_decomposition_check(path: &MotzkinPath, grid: &TimeGrid) -> bool {
    nonlevel_decomposition_residual(path, grid) <= DECOMPOSITION_TOLERANCE
}

/// Limit-law reference values for `(F, G)` on a grid of interior times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitMoments {
    pub times: Vec<f64>,
    /// `E B^ex_t / sqrt(3)`.
    pub f_mean: Vec<f64>,
    /// `Cov(B^ex_s, B^ex_t) / 3`.
    pub f_cov: Vec<Vec<f64>>,
    pub g_mean: Vec<f64>,
    /// `min(s, t)`.
    pub g_cov: Vec<Vec<f64>>,
    pub fg_cov: Vec<Vec<f64>>,
    /// Covariance of the `(A, L, D)` triple at each time.
    pub triple_cov: Vec<[[f64; 3]; 3]>,
}

pub fn limit_moments(grid: &TimeGrid) -> Result<LimitMoments> {
    if !grid.is_interior() {
        return Err(domain("limit moments need interior grid times"));
    }
    let t = grid.times().to_vec();
    let d = t.len();
    let marg = t.iter().map(|&s| excursion_marginal_moments(s)).collect::<Result<Vec<_>>>()?;
    let f_mean: Vec<f64> = marg.iter().map(|m| m.mean / 3f64.sqrt()).collect();
    let mut f_cov = vec![vec![0.0; d]; d];
    for i in 0..d {
        f_cov[i][i] = marg[i].variance / 3.0;
        for j in i + 1..d {
            let c = (excursion_cross_moment(t[i], t[j])? - marg[i].mean * marg[j].mean) / 3.0;
            f_cov[i][j] = c;
            f_cov[j][i] = c;
        }
    }
    let g_cov: Vec<Vec<f64>> = t.iter().map(|&a| t.iter().map(|&b| a.min(b)).collect()).collect();
    let map = [[0.5, -1.0 / 6.0], [0.0, 1.0 / 3.0], [-0.5, -1.0 / 6.0]];
    let triple_cov = (0..d)
        .map(|i| {
            let (vf, vg) = (f_cov[i][i], g_cov[i][i]);
            let mut c = [[0.0; 3]; 3];
            for (a, ra) in map.iter().enumerate() {
                for (b, rb) in map.iter().enumerate() {
                    c[a][b] = ra[0] * rb[0] * vf + ra[1] * rb[1] * vg;
                }
            }
            c
        })
        .collect();
    Ok(LimitMoments {
        times: t,
        f_mean,
        f_cov,
        g_mean: vec![0.0; d],
        g_cov,
        fg_cov: vec![vec![0.0; d]; d],
        triple_cov,
    })
}

/// Exact law of the height `H(floor(n t))` of a uniform path of length `n`:
/// `P(H = h) = W(m, h) W(n - m, h) / M_n`. Since `F(t) = H / sqrt(2n)`, this
/// is the exact finite-`n` law of `F(t)`.
pub fn exact_height_law(n: usize, t: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain(format!("time {t} outside [0, 1]")));
    }
    let m = floor_index(n, t);
    let left = meander_row(m);
    let right = if n - m == m { left.clone() } else { meander_row(n - m) };
    let ln_total = motzkin_number(n)?.ln();
    Ok((0..=m.min(n - m))
        .map(|h| (left[h].ln() + right[h].ln() - ln_total).exp())
        .collect())
}

/// KS distance between the exact law of `sqrt(3) F(t)` and `cdf`.
pub fn exact_ks_f<C: Fn(f64) -> f64>(n: usize, t: f64, cdf: C) -> Result<f64> {
    let law = exact_height_law(n, t)?;
    let step = 3f64.sqrt() / (2.0 * n as f64).sqrt();
    let mut below = 0.0;
    let mut d: f64 = 0.0;
    for (h, p) in law.iter().enumerate() {
        let c = cdf(h as f64 * step);
        d = d.max((c - below).abs());
        below += p;
        d = d.max((below - c).abs());
    }
    Ok(d)
}

/// Acceptance bands for [`mc_experiment`]. Finite-`n` rates are not known,
/// so the absolute allowances are empirical calibrations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McBands {
    /// Multiplier on standard errors for zero-mean checks.
    pub standard_errors: f64,
    pub f_mean_abs: f64,
    pub f_var_abs: f64,
    pub g_var_abs: f64,
    pub ks: f64,
    pub triple_sum: f64,
    pub calibration: &'static str,
}

impl Default for McBands {
    fn default() -> Self {
        McBands {
            standard_errors: 4.0,
            f_mean_abs: 0.03,
            f_var_abs: 0.015,
            g_var_abs: 0.05,
            ks: 0.03,
            triple_sum: 1e-12,
            calibration: "empirical at n = 4000, N = 40000",
        }
    }
}

#[derive(Debug, Clone)]
pub struct McConfig {
    pub n: usize,
    pub samples: usize,
    pub grid: TimeGrid,
    pub seed: u64,
    pub workers: usize,
    pub mode: SamplerMode,
    pub bands: McBands,
}

impl McConfig {
    pub fn new(n: usize, samples: usize, grid: TimeGrid, seed: u64) -> Self {
        McConfig {
            n,
            samples,
            grid,
            seed,
            workers: default_workers(),
            mode: SamplerMode::CycleLemma,
            bands: McBands::default(),
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeStats {
    pub t: f64,
    pub f_mean: f64,
    pub f_mean_se: f64,
    pub f_var: f64,
    pub g_mean: f64,
    pub g_mean_se: f64,
    pub g_var: f64,
    pub fg_cov: f64,
    pub fg_cov_se: f64,
    /// KS distance of `sqrt(3) F(t)` from the excursion marginal at `t`.
    pub ks_f: f64,
    /// KS distance of `G(t)` from `N(0, t)`.
    pub ks_g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub t: Option<f64>,
    pub value: f64,
    pub reference: f64,
    pub band: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub sampler: SamplerMode,
    pub grid: Vec<f64>,
    pub per_time: Vec<TimeStats>,
    pub f_cov: Vec<Vec<f64>>,
    pub g_cov: Vec<Vec<f64>>,
    pub fg_cov: Vec<Vec<f64>>,
    pub triple_sum_max_abs: f64,
    pub reference: LimitMoments,
    pub bands: McBands,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Per-sample `(F, G)` rows in sample order: `F(t_1..t_d), G(t_1..t_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    pub times: Vec<f64>,
    pub rows: Vec<f64>,
}

impl SampleTable {
    pub fn len(&self) -> usize {
        self.rows.len() / (2 * self.times.len()).max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = 2 * self.times.len();
        &self.rows[i * w..(i + 1) * w]
    }

    /// Column `c` of the rows: `F` at time `c` for `c < d`, else `G` at `c - d`.
    pub fn column(&self, c: usize) -> impl Iterator<Item = f64> + '_ {
        let w = 2 * self.times.len();
        self.rows.iter().skip(c).step_by(w).copied()
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header = vec!["sample".to_string()];
        header.extend(self.times.iter().map(|t| format!("F_{t}")));
        header.extend(self.times.iter().map(|t| format!("G_{t}")));
        writeln!(out, "{}", header.join(","))?;
        for i in 0..self.len() {
            let cells: Vec<String> = self.row(i).iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(out, "{i},{}", cells.join(","))?;
        }
        Ok(())
    }
}

pub struct McOutcome {
    pub report: McReport,
    pub samples: SampleTable,
}

/// Monte Carlo comparison of `(F, G)` on uniform paths with the limit laws.
/// Deterministic in `(n, samples, seed, grid, workers, mode)`.
pub fn mc_experiment(n: usize, samples: usize, grid: &TimeGrid, seed: u64, bands: &McBands) -> Result<McReport> {
    let mut config = McConfig::new(n, samples, grid.clone(), seed);
    config.bands = bands.clone();
    run_mc(&config).map(|o| o.report)
}

pub fn run_mc(config: &McConfig) -> Result<McOutcome> {
    let McConfig { n, samples, ref grid, seed, workers, mode, ref bands } = *config;
    if n < 100 {
        return Err(domain("mc needs n >= 100"));
    }
    if samples < 1000 {
        return Err(domain("mc needs at least 1000 samples"));
    }
    if grid.d() == 0 || !grid.is_interior() {
        return Err(domain("mc needs at least one interior grid time"));
    }
    let d = grid.d();
    let workers = workers.max(1);
    let reference = limit_moments(grid)?;
    let cdfs = grid.times().iter().map(|&t| ExcursionMarginalCdf::new(t)).collect::<Result<Vec<_>>>()?;

    let sampler = UniformSampler::new(n, mode);
    let parts: Vec<(Vec<f64>, MomentAccumulator, f64)> = worker_quotas(samples, workers)
        .into_par_iter()
        .enumerate()
        .map(|(w, quota)| {
            let mut rng = RandomSource::for_worker(seed, w);
            let mut rows = Vec::with_capacity(quota * 2 * d);
            let mut acc = MomentAccumulator::new(2 * d);
            let mut triple_sum: f64 = 0.0;
            for _ in 0..quota {
                let path = sampler.sample(&mut rng);
                let fv = scaled_fluctuations(&path, grid);
                let start = rows.len();
                rows.extend_from_slice(&fv.f);
                rows.extend_from_slice(&fv.g);
                acc.push(&rows[start..]);
                for t in &fv.triple {
                    triple_sum = triple_sum.max((t[0] + t[1] + t[2]).abs());
                }
            }
            (rows, acc, triple_sum)
        })
        .collect();

    let triple_sum_max_abs = parts.iter().map(|p| p.2).fold(0.0, f64::max);
    let mut rows = Vec::with_capacity(samples * 2 * d);
    let mut accs = Vec::with_capacity(parts.len());
    for (r, a, _) in parts {
        rows.extend(r);
        accs.push(a);
    }
    let acc = merge_all(accs).expect("at least one worker");
    let table = SampleTable { times: grid.times().to_vec(), rows };
    let nf = samples as f64;

    let mut per_time = Vec::with_capacity(d);
    for (i, &t) in grid.times().iter().enumerate() {
        let (fi, gi) = (i, d + i);
        let (f_mean, g_mean) = (acc.mean(fi), acc.mean(gi));
        let products: Vec<f64> = table.column(fi).zip(table.column(gi)).map(|(f, g)| (f - f_mean) * (g - g_mean)).collect();
        let pm = products.iter().sum::<f64>() / nf;
        let pv = products.iter().map(|p| (p - pm) * (p - pm)).sum::<f64>() / (nf - 1.0);
        let r3 = 3f64.sqrt();
        let f_scaled: Vec<f64> = table.column(fi).map(|f| r3 * f).collect();
        let ks_f = ks_distance(&f_scaled, |x| cdfs[i].eval(x))?;
        let normal = Normal::new(0.0, t.sqrt()).map_err(|e| domain(e.to_string()))?;
        let g_col: Vec<f64> = table.column(gi).collect();
        let ks_g = ks_distance(&g_col, |x| normal.cdf(x))?;
        per_time.push(TimeStats {
            t,
            f_mean,
            f_mean_se: (acc.variance(fi) / nf).sqrt(),
            f_var: acc.variance(fi),
            g_mean,
            g_mean_se: (acc.variance(gi) / nf).sqrt(),
            g_var: acc.variance(gi),
            fg_cov: acc.covariance(fi, gi),
            fg_cov_se: (pv / nf).sqrt(),
            ks_f,
            ks_g,
        });
    }
    let f_cov: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| acc.covariance(i, j)).collect()).collect();
    let g_cov: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| acc.covariance(d + i, d + j)).collect()).collect();
    let fg_cov: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| acc.covariance(i, d + j)).collect()).collect();

    let mut checks = Vec::new();
    let mut push = |name: &str, t: Option<f64>, value: f64, reference: f64, band: f64| {
        checks.push(Check {
            name: name.to_string(),
            t,
            value,
            reference,
            band,
            pass: (value - reference).abs() <= band,
        });
    };
    let k = bands.standard_errors;
    for (i, s) in per_time.iter().enumerate() {
        let t = Some(s.t);
        push("g_mean", t, s.g_mean, 0.0, k * s.g_mean_se);
        push("g_var", t, s.g_var, reference.g_cov[i][i], bands.g_var_abs);
        push("f_mean", t, s.f_mean, reference.f_mean[i], bands.f_mean_abs);
        push("f_var", t, s.f_var, reference.f_cov[i][i], bands.f_var_abs);
        push("fg_cov", t, s.fg_cov, 0.0, k * s.fg_cov_se);
        push("ks_f", t, s.ks_f, 0.0, bands.ks);
        push("ks_g", t, s.ks_g, 0.0, bands.ks);
    }
    for i in 0..d {
        for j in i + 1..d {
            push("g_cov", Some(grid.times()[j]), g_cov[i][j], reference.g_cov[i][j], bands.g_var_abs);
            push("f_cov", Some(grid.times()[j]), f_cov[i][j], reference.f_cov[i][j], bands.f_var_abs);
        }
    }
    push("triple_sum", None, triple_sum_max_abs, 0.0, bands.triple_sum);
    let pass = checks.iter().all(|c| c.pass);

    let report = McReport {
        n,
        samples,
        seed,
        workers,
        sampler: mode,
        grid: grid.times().to_vec(),
        per_time,
        f_cov,
        g_cov,
        fg_cov,
        triple_sum_max_abs,
        reference,
        bands: bands.clone(),
        checks,
        pass,
    };
    Ok(McOutcome { report, samples: table })
}

/// `E B^ex_{1/2} / sqrt(3)`, the limit mean of `F(1/2)`.
pub fn f_mean_at_half() -> f64 {
    (2.0 / PI).sqrt() / 3f64.sqrt()
}
