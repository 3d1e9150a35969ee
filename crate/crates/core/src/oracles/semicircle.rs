//! Semicircle-law integrals: the level-step generating function, Sulanke
//! polynomials, the Cauchy–Stieltjes transform and Motzkin growth.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::bigcount::BigCount;
use crate::counting::{binomial, catalan, motzkin_number};
use crate::error::{domain, Error, Result};
use crate::path::enumerate_paths;
use crate::quadrature::{integrate_semicircle_weighted, SemicircleQuadrature, Tolerance};

/// Largest `n` for which path-by-path enumeration is used as a check.
pub const ENUMERATION_LIMIT: usize = 12;

/// `phi(u) = (2 pi)^-1 int prod_j (u_j + y) sqrt(4 - y^2) dy`, evaluated with
/// a Gauss rule that is exact for the degree-`n` integrand.
pub fn level_pgf(u: &[f64]) -> f64 {
    SemicircleQuadrature::for_degree(u.len()).integrate(|y| u.iter().map(|&uj| uj + y).product())
}

/// `sum over paths of prod_j u_j^{[step j is level]}`, by enumeration.
pub fn level_pgf_enumeration(u: &[f64]) -> f64 {
    enumerate_paths(u.len())
        .map(|p| {
            p.steps()
                .iter()
                .zip(u)
                .filter(|(s, _)| s.is_level())
                .map(|(_, &uj)| uj)
                .product::<f64>()
        })
        .sum()
}

/// The three Sulanke evaluators at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SulankeEvaluation {
    pub n: usize,
    pub t: f64,
    pub quadrature: f64,
    pub recurrence: f64,
    /// Present for `n <= ENUMERATION_LIMIT`.
    pub enumeration: Option<f64>,
    pub max_rel_err: f64,
}

pub const SULANKE_TOLERANCE: f64 = 1e-9;

/// `S_0(t)..=S_max(t)` from `S_n = t S_{n-1} + sum_{k=0}^{n-2} S_k S_{n-2-k}`.
pub fn sulanke_recurrence_values(max: usize, t: f64) -> Vec<f64> {
    let mut s = Vec::with_capacity(max + 1);
    s.push(1.0);
    for n in 1..=max {
        let mut v = t * s[n - 1];
        for k in 0..n.saturating_sub(1) {
            v += s[k] * s[n - 2 - k];
        }
        s.push(v);
    }
    s
}

pub fn sulanke_quadrature(n: usize, t: f64) -> f64 {
    SemicircleQuadrature::for_degree(n).integrate(|y| (t + y).powi(n as i32))
}

pub fn sulanke_enumeration(n: usize, t: f64) -> f64 {
    enumerate_paths(n)
        .map(|p| t.powi(p.steps().iter().filter(|s| s.is_level()).count() as i32))
        .sum()
}

/// All available evaluators of `S_n(t)` together with their largest pairwise
/// relative discrepancy.
pub fn sulanke_evaluators(n: usize, t: f64) -> SulankeEvaluation {
    let quadrature = sulanke_quadrature(n, t);
    let recurrence = sulanke_recurrence_values(n, t)[n];
    let enumeration = (n <= ENUMERATION_LIMIT).then(|| sulanke_enumeration(n, t));
    // |S_n(t)| <= (|t| + 2)^n bounds the scale when t < 0 allows cancellation.
    let scale = if t >= 0.0 {
        quadrature.abs().max(recurrence.abs())
    } else {
        (t.abs() + 2.0).powi(n as i32)
    };
    let mut vals = vec![quadrature, recurrence];
    vals.extend(enumeration);
    let mut max_rel_err: f64 = 0.0;
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            max_rel_err = max_rel_err.max((vals[i] - vals[j]).abs() / scale.max(f64::MIN_POSITIVE));
        }
    }
    SulankeEvaluation { n, t, quadrature, recurrence, enumeration, max_rel_err }
}

/// `S_n(t)`; errors when the evaluators disagree beyond `1e-9` relative.
pub fn sulanke_poly(n: usize, t: f64) -> Result<f64> {
    let e = sulanke_evaluators(n, t);
    if e.max_rel_err > SULANKE_TOLERANCE {
        return Err(Error::InternalMismatch {
            what: "sulanke_poly",
            detail: format!("evaluators disagree at n = {n}, t = {t}: {e:?}"),
        });
    }
    Ok(e.recurrence)
}

/// Exact coefficients of `S_n(t)` in increasing powers of `t`, computed by
/// the polynomial recurrence and checked against `binom(n, j) C_{(n-j)/2}`.
pub fn sulanke_coeffs(n: usize) -> Result<Vec<BigCount>> {
    let mut polys: Vec<Vec<BigUint>> = vec![vec![BigUint::from(1u32)]];
    for m in 1..=n {
        let mut p = vec![BigUint::zero(); m + 1];
        for (i, c) in polys[m - 1].iter().enumerate() {
            p[i + 1] += c;
        }
        for k in 0..m.saturating_sub(1) {
            for (i, a) in polys[k].iter().enumerate() {
                for (j, b) in polys[m - 2 - k].iter().enumerate() {
                    p[i + j] += a * b;
                }
            }
        }
        polys.push(p);
    }
    let coeffs = polys.pop().expect("nonempty");
    for (j, c) in coeffs.iter().enumerate() {
        let direct = if (n - j).is_multiple_of(2) {
            binomial(n as u64, j as u64) * catalan(((n - j) / 2) as u64).into_biguint()
        } else {
            BigUint::zero()
        };
        if *c != direct {
            return Err(Error::InternalMismatch {
                what: "sulanke_coeffs",
                detail: format!("coefficient of t^{j} in S_{n}"),
            });
        }
    }
    Ok(coeffs.into_iter().map(BigCount::from).collect())
}

/// `G(z) = (z - sqrt(z^2 - 4)) / 2` on the real branch `|z| > 2`.
pub fn semicircle_stieltjes(z: f64) -> Result<f64> {
    if !(z.abs() > 2.0) || !z.is_finite() {
        return Err(domain(format!("Stieltjes transform needs |z| > 2, got {z}")));
    }
    // Rationalized to avoid cancellation for large |z|.
    Ok(2.0 / (z + z.signum() * (z * z - 4.0).sqrt()))
}

/// `(2 pi)^-1 int sqrt(4 - y^2) / (z - y) dy` by adaptive quadrature.
pub fn semicircle_stieltjes_quadrature(z: f64) -> Result<f64> {
    if !(z.abs() > 2.0) {
        return Err(domain(format!("Stieltjes transform needs |z| > 2, got {z}")));
    }
    integrate_semicircle_weighted(
        |y| 1.0 / (2.0 * PI * (z - y)),
        2.0,
        &[],
        Tolerance::new(1e-13, 1e-12),
    )
}

/// `M_n * 2 sqrt(pi) n^{3/2} / 3^{n + 3/2}`, computed in log space from the
/// exact Motzkin number.
pub fn motzkin_growth_ratio(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("growth ratio needs n >= 1"));
    }
    let ln_m = motzkin_number(n)?.ln();
    let nf = n as f64;
    let ln_ratio = ln_m + (2.0 * PI.sqrt()).ln() + 1.5 * nf.ln() - (nf + 1.5) * 3f64.ln();
    Ok(ln_ratio.exp())
}
