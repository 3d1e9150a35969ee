//! Goodness-of-fit statistics and mergeable moment accumulators.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{domain, Result};

/// `sup_x |F_N(x) - F(x)|` for the empirical CDF of `samples`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(domain("KS distance needs at least one sample"));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(domain("KS distance samples contain NaN"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // Ties jump the empirical CDF by their multiplicity at once.
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        d = d.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    Ok(d)
}

/// Pearson statistic and right-tail p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

fn p_value(statistic: f64, dof: usize) -> Result<f64> {
    let dist = ChiSquared::new(dof as f64).map_err(|e| domain(e.to_string()))?;
    Ok(dist.sf(statistic))
}

/// Goodness of fit of `counts` to `expected` with `len - 1` degrees of freedom.
pub fn chi_square_uniformity(counts: &[u64], expected: &[f64]) -> Result<ChiSquareTest> {
    if counts.is_empty() || counts.len() != expected.len() {
        return Err(domain("counts and expected must be nonempty and of equal length"));
    }
    if expected.iter().any(|&e| !(e > 0.0)) {
        return Err(domain("expected counts must be positive"));
    }
    let statistic = counts
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let r = o as f64 - e;
            r * r / e
        })
        .sum();
    let dof = counts.len() - 1;
    let p_value = if dof == 0 { 1.0 } else { p_value(statistic, dof)? };
    Ok(ChiSquareTest { statistic, dof, p_value })
}

/// Homogeneity test of two count vectors over the same cells; cells empty in
/// both are dropped.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquareTest> {
    if a.is_empty() || a.len() != b.len() {
        return Err(domain("count vectors must be nonempty and of equal length"));
    }
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return Err(domain("both samples must be nonempty"));
    }
    let (na, nb) = (na as f64, nb as f64);
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        let r = ka * x as f64 - kb * y as f64;
        statistic += r * r / (x + y) as f64;
        cells += 1;
    }
    let dof = cells.saturating_sub(1);
    let p_value = if dof == 0 { 1.0 } else { p_value(statistic, dof)? };
    Ok(ChiSquareTest { statistic, dof, p_value })
}

/// Upper quantile: `x` with `P(chi2_dof <= x) = prob`.
pub fn chi_square_quantile(dof: usize, prob: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&prob) || dof == 0 {
        return Err(domain("need dof >= 1 and prob in [0, 1)"));
    }
    let dist = ChiSquared::new(dof as f64).map_err(|e| domain(e.to_string()))?;
    Ok(dist.inverse_cdf(prob))
}

/// Count, sums and sums of products of a fixed-dimension vector sample.
/// Merging is exact up to floating addition order, and [`merge_all`] fixes
/// that order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentAccumulator {
    count: u64,
    sum: Vec<f64>,
    /// Row-major `dim x dim`.
    cross: Vec<f64>,
}

impl MomentAccumulator {
    pub fn new(dim: usize) -> Self {
        MomentAccumulator { count: 0, sum: vec![0.0; dim], cross: vec![0.0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.sum.len()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn push(&mut self, x: &[f64]) {
        let d = self.dim();
        assert_eq!(x.len(), d, "sample dimension");
        self.count += 1;
        for i in 0..d {
            self.sum[i] += x[i];
            for j in 0..d {
                self.cross[i * d + j] += x[i] * x[j];
            }
        }
    }

    pub fn merge(&mut self, other: &MomentAccumulator) {
        assert_eq!(self.dim(), other.dim(), "accumulator dimension");
        self.count += other.count;
        self.sum.iter_mut().zip(&other.sum).for_each(|(a, b)| *a += b);
        self.cross.iter_mut().zip(&other.cross).for_each(|(a, b)| *a += b);
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.sum[i] / self.count as f64
    }

    /// Unbiased sample covariance.
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        let n = self.count as f64;
        let d = self.dim();
        (self.cross[i * d + j] - self.sum[i] * self.sum[j] / n) / (n - 1.0)
    }

    pub fn variance(&self, i: usize) -> f64 {
        self.covariance(i, i)
    }
}

/// Pairwise merge in a fixed tree shape, so the result depends only on the
/// order of `parts`.
pub fn merge_all(mut parts: Vec<MomentAccumulator>) -> Option<MomentAccumulator> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                a.merge(&b);
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop()
}
