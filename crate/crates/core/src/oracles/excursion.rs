//! Brownian excursion finite-dimensional densities and the limiting joint
//! Laplace transform of the scaled ascent/level fluctuations.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::grid::TimeGrid;
use crate::oracles::laplace::brownian_laplace;
use crate::quadrature::{integrate, integrate_half_line, integrate_with_breaks, Tolerance};

/// `ell_t(y) = y exp(-y^2 / 2t) / sqrt(2 pi t^3)`.
pub fn ell(t: f64, y: f64) -> f64 {
    y * (-y * y / (2.0 * t)).exp() / (2.0 * PI * t * t * t).sqrt()
}

/// `g_t(a, b) = (exp(-(a-b)^2 / 2t) - exp(-(a+b)^2 / 2t)) / sqrt(2 pi t)`,
/// written with `expm1` so it stays accurate when the two terms nearly cancel.
pub fn killed_kernel(t: f64, a: f64, b: f64) -> f64 {
    let d = a - b;
    (-d * d / (2.0 * t)).exp() * -(-2.0 * a * b / t).exp_m1() / (2.0 * PI * t).sqrt()
}

fn check_grid(grid: &TimeGrid) -> Result<()> {
    if grid.d() == 0 {
        return Err(domain("excursion density needs at least one time"));
    }
    if !grid.is_interior() {
        return Err(domain("excursion times must lie in (0, 1)"));
    }
    Ok(())
}

/// Joint density of `(B^ex_{s_1}, .., B^ex_{s_d})` at `x`.
pub fn excursion_fdd_density(grid: &TimeGrid, x: &[f64]) -> Result<f64> {
    check_grid(grid)?;
    if x.len() != grid.d() {
        return Err(domain("one coordinate per grid time is required"));
    }
    if x.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(domain("excursion coordinates must be nonnegative"));
    }
    let s = grid.times();
    let d = s.len();
    let mut v = (8.0 * PI).sqrt() * ell(s[0], x[0]) * ell(1.0 - s[d - 1], x[d - 1]);
    for k in 0..d - 1 {
        v *= killed_kernel(s[k + 1] - s[k], x[k], x[k + 1]);
    }
    Ok(v)
}

/// `alpha_s(x) = 3 sqrt(3) / (sqrt(2 pi) s^{3/2}) x exp(-3 x^2 / 2s)`.
pub fn alpha(s: f64, x: f64) -> f64 {
    3.0 * 3f64.sqrt() / ((2.0 * PI).sqrt() * s.powf(1.5)) * x * (-3.0 * x * x / (2.0 * s)).exp()
}

/// `beta_s(x, y) = sqrt(3) / sqrt(2 pi s) (exp(-3(y-x)^2 / 2s) - exp(-3(y+x)^2 / 2s))`.
pub fn beta(s: f64, x: f64, y: f64) -> f64 {
    let d = y - x;
    3f64.sqrt() / (2.0 * PI * s).sqrt() * (-3.0 * d * d / (2.0 * s)).exp() * -(-6.0 * x * y / s).exp_m1()
}

/// Upper cutoff for `exp(-s v^2 / 6)` below `1e-22`.
fn gaussian_cutoff(s: f64) -> f64 {
    (6.0 * 50.0 / s).sqrt()
}

/// `alpha_s(x)` from its defining integral `pi^-1 int_0^inf v exp(-s v^2/6) sin(v x) dv`.
pub fn alpha_integral(s: f64, x: f64) -> Result<f64> {
    let vmax = gaussian_cutoff(s);
    let v = integrate(
        |v| v * (-s * v * v / 6.0).exp() * (v * x).sin(),
        0.0,
        vmax,
        Tolerance::new(1e-13, 1e-11).with_max_intervals(10_000),
    )?;
    Ok(v / PI)
}

/// `beta_s(x, y)` from `2/pi int_0^inf exp(-s v^2/6) sin(x v) sin(y v) dv`.
pub fn beta_integral(s: f64, x: f64, y: f64) -> Result<f64> {
    let vmax = gaussian_cutoff(s);
    let v = integrate(
        |v| (-s * v * v / 6.0).exp() * (x * v).sin() * (y * v).sin(),
        0.0,
        vmax,
        Tolerance::new(1e-13, 1e-11).with_max_intervals(10_000),
    )?;
    Ok(2.0 * v / PI)
}

/// Density of `(B^ex_{s_1}, .., B^ex_{s_d}) / sqrt(3)` written through
/// `alpha` and `beta`.
pub fn limit_density(grid: &TimeGrid, x: &[f64]) -> Result<f64> {
    check_grid(grid)?;
    if x.len() != grid.d() {
        return Err(domain("one coordinate per grid time is required"));
    }
    let s = grid.times();
    let d = s.len();
    let mut v = (8.0 * PI).sqrt() / (3.0 * 3f64.sqrt()) * alpha(s[0], x[0]) * alpha(1.0 - s[d - 1], x[d - 1]);
    for k in 1..d {
        v *= beta(s[k] - s[k - 1], x[k - 1], x[k]);
    }
    Ok(v)
}

fn quad_tol() -> Tolerance {
    Tolerance::new(1e-13, 1e-11).with_max_intervals(4000)
}

/// `int_{R_+^d} exp(-sum_k c_k x_k) density(x) dx` for `d <= 2`.
fn weighted_integral(d: usize, c: &[f64], scale: f64, density: &dyn Fn(&[f64]) -> f64) -> Result<f64> {
    let tol = quad_tol();
    match d {
        1 => integrate_half_line(|x| (-c[0] * x).exp() * density(&[x]), scale, tol),
        2 => {
            let mut inner_err = None;
            let v = integrate_half_line(
                |x1| {
                    let r = integrate_half_line(
                        |x2| (-c[1] * x2).exp() * density(&[x1, x2]),
                        scale,
                        tol,
                    );
                    match r {
                        Ok(v) => (-c[0] * x1).exp() * v,
                        Err(e) => {
                            inner_err.get_or_insert(e);
                            0.0
                        }
                    }
                },
                scale,
                tol,
            )?;
            match inner_err {
                Some(e) => Err(e),
                None => Ok(v),
            }
        }
        _ => Err(domain("only d <= 2 is supported")),
    }
}

fn check_z(grid: &TimeGrid, z: &[f64]) -> Result<()> {
    if z.len() != grid.d() + 1 {
        return Err(domain(format!("z needs {} values", grid.d() + 1)));
    }
    if z.windows(2).any(|p| p[0] > p[1]) {
        return Err(domain("z must be nondecreasing"));
    }
    if grid.d() > 2 {
        return Err(domain("limit Laplace transform supports d <= 2"));
    }
    Ok(())
}

/// Limit of the joint `(F_n, G_n)` increment transform:
/// `exp(1/2 sum (s_k - s_{k-1}) w_k^2) * int exp(-sum (z_{k+1} - z_k) x_k) f(x) dx`
/// with `f` the `alpha`/`beta` density.
pub fn limit_laplace(grid: &TimeGrid, z: &[f64], w: &[f64]) -> Result<f64> {
    check_z(grid, z)?;
    let brownian = brownian_laplace(grid, w)?;
    if grid.d() == 0 {
        return Ok(brownian);
    }
    let c: Vec<f64> = z.windows(2).map(|p| p[1] - p[0]).collect();
    let scale = grid.times().iter().map(|&s| (s * (1.0 - s) / 3.0).sqrt()).fold(0.0, f64::max);
    let ex = weighted_integral(grid.d(), &c, scale, &|x| limit_density(grid, x).unwrap_or(0.0))?;
    Ok(brownian * ex)
}

/// `E exp(-sum_k (z_{k+1} - z_k) B^ex_{s_k} / sqrt(3))` by quadrature of the
/// excursion density; the excursion factor of [`limit_laplace`] by an
/// independent route.
pub fn excursion_laplace_direct(grid: &TimeGrid, z: &[f64]) -> Result<f64> {
    check_z(grid, z)?;
    if grid.d() == 0 {
        return Ok(1.0);
    }
    let r3 = 3f64.sqrt();
    let c: Vec<f64> = z.windows(2).map(|p| (p[1] - p[0]) / r3).collect();
    let scale = grid.times().iter().map(|&s| (s * (1.0 - s)).sqrt()).fold(0.0, f64::max);
    weighted_integral(grid.d(), &c, scale, &|x| excursion_fdd_density(grid, x).unwrap_or(0.0))
}

/// Mean, second moment and variance of `B^ex_s` from the density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcursionMoments {
    pub mass: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

pub fn excursion_marginal_moments(s: f64) -> Result<ExcursionMoments> {
    let grid = TimeGrid::new(vec![s])?;
    let scale = (s * (1.0 - s)).sqrt();
    let tol = quad_tol();
    let dens = |x: f64| excursion_fdd_density(&grid, &[x]).unwrap_or(0.0);
    let mass = integrate_half_line(dens, scale, tol)?;
    let mean = integrate_half_line(|x| x * dens(x), scale, tol)?;
    let second_moment = integrate_half_line(|x| x * x * dens(x), scale, tol)?;
    Ok(ExcursionMoments { mass, mean, second_moment, variance: second_moment - mean * mean })
}

/// `E(B^ex_s B^ex_t)` for `s < t` from the two-time density.
pub fn excursion_cross_moment(s: f64, t: f64) -> Result<f64> {
    let grid = TimeGrid::new(vec![s, t])?;
    let scale = (s * (1.0 - s)).sqrt().max((t * (1.0 - t)).sqrt());
    let tol = quad_tol();
    let mut inner_err = None;
    let v = integrate_half_line(
        |x1| {
            match integrate_half_line(
                |x2| x2 * excursion_fdd_density(&grid, &[x1, x2]).unwrap_or(0.0),
                scale,
                tol,
            ) {
                Ok(v) => x1 * v,
                Err(e) => {
                    inner_err.get_or_insert(e);
                    0.0
                }
            }
        },
        scale,
        tol,
    )?;
    match inner_err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// CDF of `B^ex_s` tabulated on a fixed grid and linearly interpolated
/// (monotone). Tabulation error is below `1e-6` for the default size.
#[derive(Debug, Clone)]
pub struct ExcursionMarginalCdf {
    s: f64,
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

pub const CDF_TABLE_POINTS: usize = 2048;

impl ExcursionMarginalCdf {
    pub fn new(s: f64) -> Result<Self> {
        Self::with_points(s, CDF_TABLE_POINTS)
    }

    pub fn with_points(s: f64, points: usize) -> Result<Self> {
        let grid = TimeGrid::new(vec![s])?;
        let sigma = (s * (1.0 - s)).sqrt();
        let xmax = 9.0 * sigma;
        let h = xmax / (points - 1) as f64;
        let xs: Vec<f64> = (0..points).map(|i| i as f64 * h).collect();
        let mut cdf = Vec::with_capacity(points);
        let mut acc = 0.0;
        cdf.push(0.0);
        let tol = Tolerance::new(1e-15, 1e-12);
        for win in xs.windows(2) {
            acc += integrate_with_breaks(
                |x| excursion_fdd_density(&grid, &[x]).unwrap_or(0.0),
                win[0],
                win[1],
                &[],
                tol,
            )?;
            cdf.push(acc.min(1.0));
        }
        Ok(ExcursionMarginalCdf { s, xs, cdf })
    }

    pub fn time(&self) -> f64 {
        self.s
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let last = self.xs.len() - 1;
        if x >= self.xs[last] {
            return 1.0;
        }
        let h = self.xs[1];
        let i = ((x / h) as usize).min(last - 1);
        let frac = (x - self.xs[i]) / h;
        self.cdf[i] + frac * (self.cdf[i + 1] - self.cdf[i])
    }
}
