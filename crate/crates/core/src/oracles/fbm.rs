//! Free Brownian motion as a classical Markov process: semicircle marginals,
//! the explicit transition kernel, the non-crossing moment formula, and the
//! joint generating function of ascents and levels.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::partition::nc2_rec;
use crate::path::enumerate_paths;
use crate::quadrature::{integrate_semicircle_weighted, Tolerance};

/// Nondecreasing positive times `t_1 <= .. <= t_d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FbmTimes(Vec<f64>);

impl FbmTimes {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(domain("free Brownian motion times must be positive"));
        }
        if times.windows(2).any(|w| w[0] > w[1]) {
            return Err(domain("free Brownian motion times must be nondecreasing"));
        }
        Ok(FbmTimes(times))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Semicircle density of radius `2 sqrt(t)`.
pub fn fbm_density(t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain(format!("density needs t > 0, got {t}")));
    }
    let r2 = 4.0 * t - x * x;
    Ok(if r2 <= 0.0 { 0.0 } else { r2.sqrt() / (2.0 * PI * t) })
}

/// `tx^2 + sy^2 - (s+t)xy + (t-s)^2`, written as
/// `s (y - y*)^2 + (t-s)^2 (1 - x^2 / 4s)` with `y* = (s+t) x / 2s`. The
/// expanded form loses all precision near `|x| = 2 sqrt(s)`.
#[inline]
fn kernel_denominator(s: f64, x: f64, t: f64, y: f64) -> f64 {
    if s == 0.0 {
        return t * x * x - t * x * y + t * t;
    }
    let edge = 2.0 * s.sqrt();
    let room = ((edge - x.abs()) * (edge + x.abs()) / (4.0 * s)).max(0.0);
    let dy = y - (s + t) * x / (2.0 * s);
    s * dy * dy + (t - s) * (t - s) * room
}

/// Slack allowed on `|x| <= 2 sqrt(s)` for points produced by quadrature.
const SUPPORT_SLACK: f64 = 1e-12;

/// Transition density `p_{s,t}(x, y)` of the free Brownian motion.
pub fn fbm_transition(s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
    if !(s >= 0.0 && s < t) {
        return Err(domain(format!("transition needs 0 <= s < t, got s = {s}, t = {t}")));
    }
    if x.abs() > 2.0 * s.sqrt() + SUPPORT_SLACK {
        return Err(domain(format!("starting point {x} outside the support at time {s}")));
    }
    let r2 = 4.0 * t - y * y;
    if r2 <= 0.0 {
        return Ok(0.0);
    }
    let den = kernel_denominator(s, x, t, y);
    if !(den > 0.0) {
        return Err(Error::SingularDenominator { s, x, t, y });
    }
    Ok((t - s) * r2.sqrt() / (2.0 * PI * den))
}

/// Kernel with the `sqrt(4t - y^2)` factor removed, for the `y = 2 sqrt(t)
/// cos(phi)` substitution.
#[inline]
pub(crate) fn transition_reduced(s: f64, x: f64, t: f64, y: f64) -> f64 {
    (t - s) / (2.0 * PI * kernel_denominator(s, x, t, y))
}

/// Split points for integrating `p_{s,t}(x, .)`: the start point and the
/// minimiser of the denominator.
pub(crate) fn transition_breaks(s: f64, x: f64, t: f64) -> [f64; 2] {
    let ystar = if s > 0.0 { (s + t) * x / (2.0 * s) } else { 0.0 };
    [x, ystar]
}

fn kernel_tolerance() -> Tolerance {
    Tolerance::new(1e-12, 1e-11)
}

/// `int y^k p_{s,t}(x, y) dy` by adaptive quadrature.
pub fn transition_moment(s: f64, x: f64, t: f64, k: i32) -> Result<f64> {
    fbm_transition(s, x, t, 0.0)?;
    integrate_semicircle_weighted(
        |y| transition_reduced(s, x, t, y) * y.powi(k),
        2.0 * t.sqrt(),
        &transition_breaks(s, x, t),
        kernel_tolerance(),
    )
}

/// `int y^k p_t(y) dy` by adaptive quadrature.
pub fn density_moment(t: f64, k: i32) -> Result<f64> {
    fbm_density(t, 0.0)?;
    integrate_semicircle_weighted(|y| y.powi(k) / (2.0 * PI * t), 2.0 * t.sqrt(), &[], kernel_tolerance())
}

/// Both sides of `int p_{s,t}(x, y) p_{t,u}(y, z) dy = p_{s,u}(x, z)`.
pub fn chapman_kolmogorov(s: f64, x: f64, t: f64, u: f64, z: f64) -> Result<(f64, f64)> {
    if !(t < u) {
        return Err(domain(format!("need t < u, got t = {t}, u = {u}")));
    }
    let rhs = fbm_transition(s, x, u, z)?;
    let mut err = None;
    let [b1, b2] = transition_breaks(s, x, t);
    // p_{t,u}(y, z) in y peaks where its denominator is smallest.
    let b3 = (t + u) * z / (2.0 * u);
    let lhs = integrate_semicircle_weighted(
        |y| match fbm_transition(t, y.clamp(-2.0 * t.sqrt(), 2.0 * t.sqrt()), u, z) {
            Ok(q) => transition_reduced(s, x, t, y) * q,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        2.0 * t.sqrt(),
        &[b1, b2, b3, z],
        kernel_tolerance(),
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok((lhs, rhs)),
    }
}

/// `E(Z_{t_1} .. Z_{t_d})` as the sum over non-crossing pairings of
/// `{1, .., d}` of the product of `t_i` over the smaller index `i` of each
/// pair. Zero for odd `d`.
pub fn fbm_joint_moment(times: &FbmTimes) -> f64 {
    let t = times.as_slice();
    if t.len() % 2 == 1 {
        return 0.0;
    }
    let idx: Vec<usize> = (1..=t.len()).collect();
    let mut total = 0.0;
    nc2_rec(&idx, &mut Vec::with_capacity(t.len() / 2), &mut |pairs| {
        total += pairs.iter().map(|&(i, _)| t[i - 1]).product::<f64>();
    });
    total
}

/// Independent check of [`fbm_joint_moment`] for `d <= 3`: nested adaptive
/// quadrature of `x_1 .. x_d` against the marginal and transition densities.
pub fn fbm_joint_moment_quadrature(times: &FbmTimes) -> Result<f64> {
    let t = times.as_slice();
    if t.len() > 3 {
        return Err(domain("quadrature moment supports d <= 3"));
    }
    if t.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain("quadrature moment needs strictly increasing times"));
    }
    if t.is_empty() {
        return Ok(1.0);
    }
    // Inner integrals are resolved 10x tighter than the level above, so
    // their round-off does not stall the outer refinement.
    let tol_at = |k: usize| {
        let slack = 10f64.powi((t.len() - 1 - k) as i32);
        Tolerance::new(1e-11 * slack, 1e-11 * slack).with_max_intervals(4000)
    };
    // inner(k, x) = E(Z_{t_k} .. Z_{t_d} | Z_{t_{k-1}} = x)
    fn inner(t: &[f64], k: usize, x: f64, tol_at: &dyn Fn(usize) -> Tolerance) -> Result<f64> {
        if k == t.len() {
            return Ok(1.0);
        }
        let (s, u) = (t[k - 1], t[k]);
        let mut err = None;
        let v = integrate_semicircle_weighted(
            |y| match inner(t, k + 1, y, tol_at) {
                Ok(rest) => transition_reduced(s, x, u, y) * y * rest,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            2.0 * u.sqrt(),
            &transition_breaks(s, x, u),
            tol_at(k),
        )?;
        match err {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }
    let mut err = None;
    let t1 = t[0];
    let v = integrate_semicircle_weighted(
        |x| match inner(t, 1, x, &tol_at) {
            Ok(rest) => x * rest / (2.0 * PI * t1),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        2.0 * t1.sqrt(),
        &[],
        tol_at(0),
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Both sides of the ascent/level generating-function identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointPgf {
    /// `sum over paths of prod t_j^{[ascent at j]} u_j^{[level at j]}`.
    pub paths: f64,
    /// `E prod (u_j + Z_{t_j})` expanded through the non-crossing moments.
    pub moments: f64,
    pub rel_err: f64,
}

pub const JOINT_PGF_TOLERANCE: f64 = 1e-9;

/// Largest `n` for the path-sum side.
pub const JOINT_PGF_MAX_N: usize = 12;

/// `E prod_j (u_j + Z_{t_j})` by expanding over even subsets `S`.
pub fn joint_pgf_moments(times: &FbmTimes, u: &[f64]) -> Result<f64> {
    let t = times.as_slice();
    if t.len() != u.len() {
        return Err(domain("times and u must have equal length"));
    }
    let n = t.len();
    if n > 20 {
        return Err(domain("subset expansion supports n <= 20"));
    }
    let mut total = 0.0;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let mut sub = Vec::with_capacity(mask.count_ones() as usize);
        let mut level_weight = 1.0;
        for j in 0..n {
            if mask >> j & 1 == 1 {
                sub.push(t[j]);
            } else {
                level_weight *= u[j];
            }
        }
        if level_weight == 0.0 {
            continue;
        }
        total += level_weight * fbm_joint_moment(&FbmTimes(sub));
    }
    Ok(total)
}

pub fn joint_pgf_paths(times: &FbmTimes, u: &[f64]) -> Result<f64> {
    let t = times.as_slice();
    if t.len() != u.len() {
        return Err(domain("times and u must have equal length"));
    }
    if t.len() > JOINT_PGF_MAX_N {
        return Err(domain(format!("path enumeration supports n <= {JOINT_PGF_MAX_N}")));
    }
    Ok(enumerate_paths(t.len())
        .map(|p| {
            p.steps()
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    if s.is_ascent() {
                        t[j]
                    } else if s.is_level() {
                        u[j]
                    } else {
                        1.0
                    }
                })
                .product::<f64>()
        })
        .sum())
}

/// Evaluate both sides and require agreement to `1e-9` relative.
pub fn joint_pgf(times: &FbmTimes, u: &[f64]) -> Result<JointPgf> {
    let paths = joint_pgf_paths(times, u)?;
    let moments = joint_pgf_moments(times, u)?;
    let scale = paths.abs().max(moments.abs()).max(f64::MIN_POSITIVE);
    let rel_err = (paths - moments).abs() / scale;
    if rel_err > JOINT_PGF_TOLERANCE {
        return Err(Error::InternalMismatch {
            what: "joint_pgf",
            detail: format!("paths {paths} vs moments {moments}"),
        });
    }
    Ok(JointPgf { paths, moments, rel_err })
}
