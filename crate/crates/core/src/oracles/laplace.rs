//! Finite-`n` Laplace transforms of the level and ascent counting processes,
//! as exact semicircle / free-Brownian-motion integrals.
//!
//! Integrands grow like `3^n`, so every evaluator works with logarithms and
//! explicit signs and divides by `M_n` in log space. Negative-`y`
//! contributions are kept.

use std::f64::consts::PI;

use serde::Serialize;

use crate::counting::motzkin_number;
use crate::error::{domain, Error, Result};
use crate::grid::TimeGrid;
use crate::oracles::fbm::{transition_breaks, transition_reduced};
use crate::quadrature::{integrate_with_breaks, SemicircleQuadrature, Tolerance};

/// `(sign, ln|x|)` of a real number.
#[inline]
fn signed_ln(x: f64) -> (f64, f64) {
    if x == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        (x.signum(), x.abs().ln())
    }
}

/// `(sign, ln|x^k|)`.
#[inline]
fn signed_ln_pow(x: f64, k: usize) -> (f64, f64) {
    if k == 0 {
        return (1.0, 0.0);
    }
    let (s, l) = signed_ln(x);
    let sign = if s < 0.0 && k % 2 == 1 { -1.0 } else if s == 0.0 { 0.0 } else { 1.0 };
    (sign, k as f64 * l)
}

fn check_lengths(grid: &TimeGrid, w: &[f64], name: &str) -> Result<()> {
    if w.len() != grid.d() + 1 {
        return Err(domain(format!(
            "{name} needs {} values for a grid with d = {}, got {}",
            grid.d() + 1,
            grid.d(),
            w.len()
        )));
    }
    if !grid.is_interior() {
        return Err(domain("Laplace transforms need interior grid times"));
    }
    Ok(())
}

/// `(2 pi M_n)^-1 int prod_k f_k(y)^{n_k} sqrt(4 - y^2) dy` with the Gauss
/// rule exact for degree `n`.
fn semicircle_block_integral(n: usize, blocks: &[usize], factor: impl Fn(usize, f64) -> f64) -> Result<f64> {
    let quad = SemicircleQuadrature::for_degree(n);
    let (sign, ln_int) = quad.integrate_log(|y| {
        let mut sign = 1.0;
        let mut ln = 0.0;
        for (k, &nk) in blocks.iter().enumerate() {
            let (s, l) = signed_ln_pow(factor(k, y), nk);
            sign *= s;
            ln += l;
        }
        (sign, ln)
    });
    let ln_m = motzkin_number(n)?.ln();
    Ok(sign * (ln_int - ln_m).exp())
}

/// `E exp(sum_k w_k (L_n(s_k) - L_n(s_{k-1})))` for a uniform path of
/// length `n`.
pub fn laplace_level_increments(n: usize, grid: &TimeGrid, w: &[f64]) -> Result<f64> {
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    check_lengths(grid, w, "w")?;
    let blocks = grid.block_sizes(n);
    let ew: Vec<f64> = w.iter().map(|x| x.exp()).collect();
    semicircle_block_integral(n, &blocks, |k, y| ew[k] + y)
}

/// `E exp(sum_k w_k (G_n(s_k) - G_n(s_{k-1})))` with
/// `G_n(s) = (3 L_n(s) - floor(n s)) / sqrt(2n)`.
pub fn laplace_level_increments_centered(n: usize, grid: &TimeGrid, w: &[f64]) -> Result<f64> {
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    check_lengths(grid, w, "w")?;
    let blocks = grid.block_sizes(n);
    let root = (2.0 * n as f64).sqrt();
    let u: Vec<f64> = w.iter().map(|x| (x / root).exp()).collect();
    semicircle_block_integral(n, &blocks, |k, y| u[k] * u[k] + y / u[k])
}

/// Limit of the centered level transform: `exp(1/2 sum (s_k - s_{k-1}) w_k^2)`.
pub fn brownian_laplace(grid: &TimeGrid, w: &[f64]) -> Result<f64> {
    check_lengths(grid, w, "w")?;
    Ok((0.5 * grid.durations().iter().zip(w).map(|(ds, wk)| ds * wk * wk).sum::<f64>()).exp())
}

/// Joint transform of `(F_n, G_n)` increments:
/// `E exp(sum_k z_k dF_k + w_k dG_k)` with
/// `F_n(s) = (2 A_n(s) + L_n(s) - floor(n s)) / sqrt(2n)`.
///
/// Evaluated as `M_n^-1 E prod_k (u_k^2 + Z_{t_k^2} / (u_k t_k))^{n_k}` with
/// `u_k = exp(w_k / sqrt(2n))`, `t_k = exp(z_k / sqrt(2n))`, by nested adaptive
/// quadrature over the free Brownian motion. Supports `d <= 2`.
pub fn laplace_joint(n: usize, grid: &TimeGrid, z: &[f64], w: &[f64]) -> Result<f64> {
    laplace_joint_with(n, grid, z, w, LaplaceJointOptions::default()).map(|r| r.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceJointOptions {
    pub tolerance: Tolerance,
}

impl Default for LaplaceJointOptions {
    fn default() -> Self {
        LaplaceJointOptions { tolerance: Tolerance::new(1e-22, 1e-10).with_max_intervals(20_000) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceJointResult {
    pub value: f64,
    /// `ln` of the factor pulled out of the integral before quadrature.
    pub ln_prefactor: f64,
    /// Normalized integral `E prod_k r_k(Z)^{n_k}` with `|r_k| <= 1`.
    pub normalized: f64,
}

struct JointSetup {
    blocks: Vec<usize>,
    /// Free Brownian motion times `t_k^2`.
    tau: Vec<f64>,
    /// `u_k^2 / c_k` and `1 / (u_k t_k c_k)`, so that
    /// `r_k(y) = a_k + b_k y` and `max r_k = 1` at `y = 2 t_k`.
    a: Vec<f64>,
    b: Vec<f64>,
}

impl JointSetup {
    #[inline]
    fn ratio_pow(&self, k: usize, y: f64) -> f64 {
        let (s, l) = signed_ln_pow(self.a[k] + self.b[k] * y, self.blocks[k]);
        if s == 0.0 {
            0.0
        } else {
            s * l.exp()
        }
    }

    /// Break points in `phi` resolving the `r_k^{n_k}` peak at `phi = 0`.
    fn peak_breaks(&self, k: usize) -> Vec<f64> {
        let nk = self.blocks[k].max(1) as f64;
        let width = (3.0 / nk).sqrt();
        [0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0]
            .iter()
            .map(|c| c * width)
            .filter(|&p| p < PI)
            .collect()
    }
}

pub fn laplace_joint_with(
    n: usize,
    grid: &TimeGrid,
    z: &[f64],
    w: &[f64],
    opts: LaplaceJointOptions,
) -> Result<LaplaceJointResult> {
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    check_lengths(grid, w, "w")?;
    check_lengths(grid, z, "z")?;
    if grid.d() > 2 {
        return Err(domain("laplace_joint supports d <= 2"));
    }
    if z.iter().any(|&zk| !(zk > 0.0)) || z.windows(2).any(|p| p[0] >= p[1]) {
        return Err(domain("z must be positive and strictly increasing"));
    }
    let root = (2.0 * n as f64).sqrt();
    let blocks = grid.block_sizes(n);
    let mut setup = JointSetup { blocks, tau: vec![], a: vec![], b: vec![] };
    let mut ln_prefactor = -motzkin_number(n)?.ln();
    for (k, (&zk, &wk)) in z.iter().zip(w).enumerate() {
        let u = (wk / root).exp();
        let t = (zk / root).exp();
        let c = u * u + 2.0 / u;
        setup.tau.push(t * t);
        setup.a.push(u * u / c);
        setup.b.push(1.0 / (u * t * c));
        ln_prefactor += setup.blocks[k] as f64 * c.ln();
    }

    let tol = opts.tolerance;
    let mut err: Option<Error> = None;
    let normalized = integrate_phi(&setup, 0, None, tol, &mut err)?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(LaplaceJointResult { value: normalized * ln_prefactor.exp(), ln_prefactor, normalized })
}

/// Level `k` of the nested integral: conditional on `Z_{tau_{k-1}} = x`
/// (or the marginal when `prev` is `None`).
fn integrate_phi(
    setup: &JointSetup,
    k: usize,
    prev: Option<f64>,
    tol: Tolerance,
    err: &mut Option<Error>,
) -> Result<f64> {
    let last = setup.tau.len() - 1;
    let tau = setup.tau[k];
    let radius = 2.0 * tau.sqrt();
    let mut breaks = setup.peak_breaks(k);
    let kernel: Box<dyn Fn(f64) -> f64> = match prev {
        None => Box::new(move |_y| 1.0 / (2.0 * PI * tau)),
        Some(x) => {
            let s = setup.tau[k - 1];
            breaks.extend(
                transition_breaks(s, x, tau)
                    .iter()
                    .filter(|y| y.abs() < radius)
                    .map(|&y| (y / radius).acos()),
            );
            Box::new(move |y| transition_reduced(s, x, tau, y))
        }
    };
    let r2 = radius * radius;
    // Inner levels run 10x tighter so their noise does not stall this one.
    let inner_tol = Tolerance { abs: tol.abs * 0.1, rel: tol.rel * 0.1, ..tol };
    let mut inner_err: Option<Error> = None;
    let v = integrate_with_breaks(
        |phi| {
            let sin = phi.sin();
            let y = radius * phi.cos();
            let head = setup.ratio_pow(k, y);
            if head == 0.0 {
                return 0.0;
            }
            let rest = if k == last {
                1.0
            } else {
                match integrate_phi(setup, k + 1, Some(y), inner_tol, &mut inner_err) {
                    Ok(v) => v,
                    Err(e) => {
                        inner_err.get_or_insert(e);
                        0.0
                    }
                }
            };
            kernel(y) * head * rest * r2 * sin * sin
        },
        0.0,
        PI,
        &breaks,
        tol,
    )?;
    if let Some(e) = inner_err {
        err.get_or_insert(e);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{counting_at_index, enumerate_paths};
    use crate::grid::floor_index;

    /// Brute-force `E exp(sum z_k dF_k + w_k dG_k)` over all paths.
    fn brute_joint(n: usize, grid: &TimeGrid, z: &[f64], w: &[f64]) -> f64 {
        let root = (2.0 * n as f64).sqrt();
        let ends: Vec<usize> = grid.with_endpoints().iter().map(|&s| floor_index(n, s)).collect();
        let mut total = 0.0;
        let mut count = 0.0;
        for p in enumerate_paths(n) {
            let f_g = |idx: usize| {
                let c = counting_at_index(&p, idx);
                let f = (2.0 * c.ascents as f64 + c.levels as f64 - idx as f64) / root;
                let g = (3.0 * c.levels as f64 - idx as f64) / root;
                (f, g)
            };
            let mut expo = 0.0;
            for k in 0..z.len() {
                let (f0, g0) = f_g(ends[k]);
                let (f1, g1) = f_g(ends[k + 1]);
                expo += z[k] * (f1 - f0) + w[k] * (g1 - g0);
            }
            total += expo.exp();
            count += 1.0;
        }
        total / count
    }

    fn brute_level(n: usize, grid: &TimeGrid, w: &[f64]) -> f64 {
        let ends: Vec<usize> = grid.with_endpoints().iter().map(|&s| floor_index(n, s)).collect();
        let mut total = 0.0;
        let mut count = 0.0;
        for p in enumerate_paths(n) {
            let mut expo = 0.0;
            for k in 0..w.len() {
                let l0 = counting_at_index(&p, ends[k]).levels as f64;
                let l1 = counting_at_index(&p, ends[k + 1]).levels as f64;
                expo += w[k] * (l1 - l0);
            }
            total += expo.exp();
            count += 1.0;
        }
        total / count
    }

    #[test]
    fn level_transform_examples() {
        let g = TimeGrid::single_block();
        assert!((laplace_level_increments(7, &g, &[0.0]).unwrap() - 1.0).abs() < 1e-13);
        let v = laplace_level_increments(2, &g, &[2f64.ln()]).unwrap();
        assert!((v - 2.5).abs() < 1e-13);
        let g3 = TimeGrid::new(vec![0.3, 0.7]).unwrap();
        assert!((laplace_level_increments(9, &g3, &[0.0; 3]).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn level_transform_matches_enumeration() {
        let g = TimeGrid::new(vec![0.3, 0.6]).unwrap();
        let w = [0.4, -0.7, 1.1];
        let a = laplace_level_increments(11, &g, &w).unwrap();
        let b = brute_level(11, &g, &w);
        assert!(((a - b) / b).abs() < 1e-12, "{a} vs {b}");
        let a = laplace_level_increments_centered(11, &g, &w).unwrap();
        let root = 22f64.sqrt();
        // dG_k = (3 dL_k - n_k) / sqrt(2n)
        let blocks = g.block_sizes(11);
        let shifted: Vec<f64> = w.iter().map(|x| 3.0 * x / root).collect();
        let b = brute_level(11, &g, &shifted)
            * (-w.iter().zip(&blocks).map(|(x, &nk)| x * nk as f64 / root).sum::<f64>()).exp();
        assert!(((a - b) / b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn level_transform_is_finite_at_large_n() {
        let g = TimeGrid::single_block();
        let v = laplace_level_increments_centered(20_000, &g, &[0.6]).unwrap();
        assert!(v.is_finite() && v > 1.0 && v < 1.5);
    }

    #[test]
    fn joint_matches_enumeration_small_n() {
        let g = TimeGrid::new(vec![0.5]).unwrap();
        let (z, w) = ([0.3, 0.9], [0.2, -0.5]);
        let a = laplace_joint(8, &g, &z, &w).unwrap();
        let b = brute_joint(8, &g, &z, &w);
        assert!(((a - b) / b).abs() < 1e-8, "{a} vs {b}");

        let g0 = TimeGrid::single_block();
        let a = laplace_joint(9, &g0, &[0.4], &[0.7]).unwrap();
        let b = brute_joint(9, &g0, &[0.4], &[0.7]);
        assert!(((a - b) / b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn joint_matches_enumeration_two_interior_times() {
        let g = TimeGrid::new(vec![0.3, 0.7]).unwrap();
        let (z, w) = ([0.2, 0.5, 1.0], [0.1, 0.0, -0.3]);
        let a = laplace_joint(10, &g, &z, &w).unwrap();
        let b = brute_joint(10, &g, &z, &w);
        assert!(((a - b) / b).abs() < 1e-7, "{a} vs {b}");
    }

    #[test]
    fn joint_single_block_equals_level_integral() {
        let g = TimeGrid::single_block();
        for n in [50usize, 400] {
            let a = laplace_joint(n, &g, &[0.3], &[0.6]).unwrap();
            let b = laplace_level_increments_centered(n, &g, &[0.6]).unwrap();
            assert!(((a - b) / b).abs() < 1e-8, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn joint_domain_errors() {
        let g = TimeGrid::new(vec![0.5]).unwrap();
        assert!(laplace_joint(10, &g, &[0.5, 0.2], &[0.0, 0.0]).is_err());
        assert!(laplace_joint(10, &g, &[0.0, 0.2], &[0.0, 0.0]).is_err());
        assert!(laplace_joint(10, &g, &[0.1], &[0.0, 0.0]).is_err());
        let g3 = TimeGrid::new(vec![0.2, 0.4, 0.6]).unwrap();
        assert!(laplace_joint(10, &g3, &[0.1, 0.2, 0.3, 0.4], &[0.0; 4]).is_err());
    }
}
