//! Quadrature: the exact Gauss rule for the semicircle weight, and a global
//! adaptive Gauss–Kronrod (7/15) integrator for everything non-polynomial.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss rule for `(2 pi)^-1 sqrt(4 - y^2) dy` on `[-2, 2]` (Chebyshev of the
/// second kind, rescaled). Exact for polynomials of degree `<= 2N - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemicircleQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// `y_i = 2 cos(i pi / (N+1))`, `w_i = 2/(N+1) sin^2(i pi / (N+1))`.
pub fn build_quadrature(node_count: usize) -> SemicircleQuadrature {
    let n = node_count.max(1);
    let h = PI / (n as f64 + 1.0);
    let (nodes, weights) = (1..=n)
        .map(|i| {
            let theta = i as f64 * h;
            (2.0 * theta.cos(), 2.0 / (n as f64 + 1.0) * theta.sin().powi(2))
        })
        .unzip();
    SemicircleQuadrature { nodes, weights }
}

impl SemicircleQuadrature {
    /// Smallest rule exact for polynomials of degree `degree`.
    pub fn for_degree(degree: usize) -> Self {
        build_quadrature(degree / 2 + 1)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&y, &w)| w * f(y)).sum()
    }

    /// Integral of `exp(g(y))` and sign, for integrands too large for `f64`.
    /// `g` returns `(sign, ln|value|)`. Returns `(sign, ln|integral|)`.
    pub fn integrate_log<F: FnMut(f64) -> (f64, f64)>(&self, mut g: F) -> (f64, f64) {
        let terms: Vec<(f64, f64)> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&y, &w)| {
                let (s, l) = g(y);
                (s, l + w.ln())
            })
            .collect();
        signed_log_sum(&terms)
    }

    pub fn moment(&self, m: u32) -> f64 {
        self.integrate(|y| y.powi(m as i32))
    }
}

/// `sum_i s_i exp(l_i)` as `(sign, ln|sum|)`.
pub fn signed_log_sum(terms: &[(f64, f64)]) -> (f64, f64) {
    let max = terms
        .iter()
        .filter(|(s, _)| *s != 0.0)
        .map(|&(_, l)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return (0.0, f64::NEG_INFINITY);
    }
    let acc: f64 = terms.iter().map(|&(s, l)| s * (l - max).exp()).sum();
    if acc == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    (acc.signum(), max + acc.abs().ln())
}

/// Stopping rule: `error <= max(abs, rel * |integral|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-10, rel: 1e-8, max_intervals: 4000 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, ..Default::default() }
    }

    pub fn with_max_intervals(mut self, max: usize) -> Self {
        self.max_intervals = max;
        self
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Segment { a, b, value: k * h, error: ((k - g) * h).abs() }
}

/// Global adaptive integration of `f` over `[a, b]`, bisecting the segment
/// with the largest error estimate. `breaks` are extra initial split points
/// (ignored when outside `(a, b)`).
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_with_breaks(f, b, a, breaks, tol).map(|v| -v);
    }
    let mut points: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b && x.is_finite()))
        .chain(std::iter::once(b))
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut heap: BinaryHeap<Segment> = points.windows(2).map(|w| kronrod(&mut f, w[0], w[1])).collect();
    let mut value: f64 = heap.iter().map(|s| s.value).sum();
    let mut error: f64 = heap.iter().map(|s| s.error).sum();
    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureFailure { estimate: error });
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::QuadratureFailure { estimate: error });
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureFailure { estimate: error });
        }
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Running sums drift; refresh them occasionally.
        if heap.len() % 64 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(heap.iter().map(|s| s.value).sum())
}

pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    integrate_with_breaks(f, a, b, &[], tol)
}

/// `int_0^inf f(x) dx` through `x = scale * u / (1 - u)`.
pub fn integrate_half_line<F: FnMut(f64) -> f64>(mut f: F, scale: f64, tol: Tolerance) -> Result<f64> {
    integrate(
        |u| {
            let one_minus = 1.0 - u;
            let x = scale * u / one_minus;
            let jac = scale / (one_minus * one_minus);
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v * jac
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// `int_{-r}^{r} g(y) sqrt(r^2 - y^2) dy` through `y = r cos(phi)`, which
/// removes the square-root endpoint singularities.
pub fn integrate_semicircle_weighted<F: FnMut(f64) -> f64>(
    mut g: F,
    radius: f64,
    breaks_y: &[f64],
    tol: Tolerance,
) -> Result<f64> {
    let r2 = radius * radius;
    let breaks: Vec<f64> = breaks_y
        .iter()
        .filter(|y| y.abs() < radius)
        .map(|&y| (y / radius).acos())
        .collect();
    integrate_with_breaks(
        |phi| {
            let s = phi.sin();
            g(radius * phi.cos()) * r2 * s * s
        },
        0.0,
        PI,
        &breaks,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::catalan;

    #[test]
    fn one_node_rule() {
        let q = build_quadrature(1);
        assert_eq!(q.node_count(), 1);
        assert!(q.nodes()[0].abs() < 1e-15);
        assert!((q.weights()[0] - 1.0).abs() < 1e-15);
        assert!((q.moment(0) - 1.0).abs() < 1e-15);
        assert!(q.moment(1).abs() < 1e-15);
    }

    #[test]
    fn three_node_rule_moments() {
        let q = build_quadrature(3);
        assert!((q.moment(2) - catalan(1).to_f64()).abs() < 1e-13);
        assert!((q.moment(4) - catalan(2).to_f64()).abs() < 1e-13);
    }

    #[test]
    fn eight_node_rule_m14() {
        let q = build_quadrature(8);
        let c7 = catalan(7).to_f64();
        assert_eq!(c7, 429.0);
        assert!(((q.moment(14) - c7) / c7).abs() < 1e-12);
    }

    #[test]
    fn exactness_up_to_degree_2n_minus_1() {
        for n in 1..=20usize {
            let q = build_quadrature(n);
            for m in 0..=(2 * n - 1) as u32 {
                let exact = if m % 2 == 1 { 0.0 } else { catalan(u64::from(m / 2)).to_f64() };
                let got = q.moment(m);
                let scale = exact.max(2f64.powi(m as i32));
                assert!(((got - exact) / scale).abs() < 1e-13, "N={n} m={m}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn adaptive_handles_smooth_and_peaked() {
        let v = integrate(|x| x.sin(), 0.0, PI, Tolerance::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
        let eps = 1e-3;
        let v = integrate(|x| eps / (x * x + eps * eps), -1.0, 1.0, Tolerance::new(1e-12, 1e-10)).unwrap();
        assert!((v - 2.0 * (1.0 / eps).atan()).abs() < 1e-9);
    }

    #[test]
    fn half_line_gaussian() {
        let v = integrate_half_line(|x| (-x * x).exp(), 1.0, Tolerance::new(1e-12, 1e-10)).unwrap();
        assert!((v - PI.sqrt() / 2.0).abs() < 1e-10);
    }

    #[test]
    fn semicircle_weighted_mass() {
        let v = integrate_semicircle_weighted(|_| 1.0 / (2.0 * PI), 2.0, &[], Tolerance::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn signed_log_sum_cancels() {
        let (s, l) = signed_log_sum(&[(1.0, 1000.0), (-1.0, 1000.0 + (0.5f64).ln())]);
        assert_eq!(s, 1.0);
        assert!((l - (1000.0 + (0.5f64).ln())).abs() < 1e-12);
        assert_eq!(signed_log_sum(&[]).0, 0.0);
    }

    #[test]
    fn failure_is_reported() {
        let tol = Tolerance::new(1e-14, 1e-14).with_max_intervals(4);
        let r = integrate(|x| 1.0 / x.abs().sqrt(), -1.0, 1.0, tol);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
