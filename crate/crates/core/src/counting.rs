//! Exact Motzkin and Catalan numbers, and the meander table used by the
//! DP sampler.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bigcount::BigCount;
use crate::error::{Error, Result};

/// Largest `n` for which `motzkin_number` cross-checks against the quadratic
/// convolution recurrence. Above it the linear three-term recurrence
/// `(n+2) M_n = (2n+1) M_{n-1} + 3(n-1) M_{n-2}` is the second route.
pub const CONVOLUTION_LIMIT: usize = 2000;

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C_k = binom(2k, k) / (k + 1)`.
pub fn catalan(k: u64) -> BigCount {
    BigCount::from(binomial(2 * k, k) / (k + 1))
}

/// Catalan numbers `C_0..=C_max` by the quadratic recurrence.
pub fn catalan_by_recurrence(max: usize) -> Vec<BigUint> {
    let mut c: Vec<BigUint> = Vec::with_capacity(max + 1);
    c.push(BigUint::one());
    for k in 1..=max {
        let mut acc = BigUint::zero();
        for i in 0..k {
            acc += &c[i] * &c[k - 1 - i];
        }
        c.push(acc);
    }
    c
}

/// `M_n = sum_k binom(n, 2k) C_k`, with both factors updated incrementally.
pub fn motzkin_by_binomial_sum(n: u64) -> BigUint {
    let mut binom = BigUint::one(); // binom(n, 0)
    let mut cat = BigUint::one(); // C_0
    let mut total = BigUint::zero();
    let mut k = 0u64;
    loop {
        total += &binom * &cat;
        if 2 * k + 2 > n {
            break;
        }
        binom = binom * ((n - 2 * k) * (n - 2 * k - 1)) / ((2 * k + 1) * (2 * k + 2));
        cat = cat * (2 * (2 * k + 1)) / (k + 2);
        k += 1;
    }
    total
}

/// `M_0..=M_max` from `M_n = M_{n-1} + sum_{k=0}^{n-2} M_k M_{n-2-k}`.
pub fn motzkin_by_convolution(max: usize) -> Vec<BigUint> {
    let mut m: Vec<BigUint> = Vec::with_capacity(max + 1);
    m.push(BigUint::one());
    for n in 1..=max {
        let mut acc = m[n - 1].clone();
        for k in 0..n.saturating_sub(1) {
            acc += &m[k] * &m[n - 2 - k];
        }
        m.push(acc);
    }
    m
}

/// `M_0..=M_max` from the holonomic three-term recurrence.
pub fn motzkin_by_three_term(max: usize) -> Vec<BigUint> {
    let mut m: Vec<BigUint> = Vec::with_capacity(max + 1);
    m.push(BigUint::one());
    if max >= 1 {
        m.push(BigUint::one());
    }
    for n in 2..=max {
        let nn = n as u64;
        let v = (&m[n - 1] * (2 * nn + 1) + &m[n - 2] * (3 * (nn - 1))) / (nn + 2);
        m.push(v);
    }
    m
}

/// Exact Motzkin number, computed by two independent routes that must agree.
pub fn motzkin_number(n: usize) -> Result<BigCount> {
    let by_sum = motzkin_by_binomial_sum(n as u64);
    let (other, route) = if n <= CONVOLUTION_LIMIT {
        (motzkin_by_convolution(n).pop().expect("nonempty"), "convolution")
    } else {
        (motzkin_by_three_term(n).pop().expect("nonempty"), "three-term recurrence")
    };
    if by_sum != other {
        return Err(Error::InternalMismatch {
            what: "motzkin_number",
            detail: format!("binomial-Catalan sum and {route} disagree at n = {n}"),
        });
    }
    Ok(BigCount::from(by_sum))
}

/// Exact `M_0..=M_max` (three-term recurrence, spot-checked at `M_max`
/// against the binomial sum).
pub fn motzkin_numbers(max: usize) -> Result<Vec<BigCount>> {
    let seq = motzkin_by_three_term(max);
    if seq[max] != motzkin_by_binomial_sum(max as u64) {
        return Err(Error::InternalMismatch {
            what: "motzkin_numbers",
            detail: format!("three-term recurrence disagrees with binomial sum at n = {max}"),
        });
    }
    Ok(seq.into_iter().map(BigCount::from).collect())
}

/// `W(m, h)`: number of nonnegative paths of `m` steps in {-1, 0, +1} from
/// height `h` down to height 0. Rows are stored for `h <= m` only, since
/// `W(m, h) = 0` for `h > m`.
#[derive(Debug, Clone)]
pub struct MeanderTable {
    rows: Vec<Vec<BigCount>>,
}

pub fn meander_table(n: usize) -> MeanderTable {
    let mut rows: Vec<Vec<BigCount>> = Vec::with_capacity(n + 1);
    rows.push(vec![BigCount::one()]);
    for m in 1..=n {
        let prev = &rows[m - 1];
        let at = |h: usize| prev.get(h).map(|c| c.as_biguint().clone()).unwrap_or_default();
        let row = (0..=m)
            .map(|h| {
                let mut v = at(h + 1) + at(h);
                if h > 0 {
                    v += at(h - 1);
                }
                BigCount::from(v)
            })
            .collect();
        rows.push(row);
    }
    MeanderTable { rows }
}

/// Row `W(m, .)` alone, in `O(m)` memory.
pub fn meander_row(m: usize) -> Vec<BigCount> {
    let mut row = vec![BigUint::from(1u32)];
    for len in 1..=m {
        let at = |h: usize| row.get(h).cloned().unwrap_or_default();
        let next: Vec<BigUint> = (0..=len)
            .map(|h| {
                let mut v = at(h + 1) + at(h);
                if h > 0 {
                    v += at(h - 1);
                }
                v
            })
            .collect();
        row = next;
    }
    row.into_iter().map(BigCount::from).collect()
}

impl MeanderTable {
    pub fn max_steps(&self) -> usize {
        self.rows.len() - 1
    }

    /// `W(m, h)`; zero outside the stored triangle.
    pub fn get(&self, m: usize, h: usize) -> BigCount {
        self.rows
            .get(m)
            .and_then(|r| r.get(h))
            .cloned()
            .unwrap_or_else(BigCount::zero)
    }

    pub(crate) fn get_ref(&self, m: usize, h: usize) -> Option<&BigUint> {
        self.rows.get(m).and_then(|r| r.get(h)).map(BigCount::as_biguint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MOTZKIN: [u64; 13] = [1, 1, 2, 4, 9, 21, 51, 127, 323, 835, 2188, 5798, 15511];

    #[test]
    fn catalan_examples() {
        assert_eq!(catalan(0), 1);
        assert_eq!(catalan(3), 5);
        assert_eq!(catalan(10), 16796);
        let rec = catalan_by_recurrence(30);
        for (k, c) in rec.iter().enumerate() {
            assert_eq!(catalan(k as u64).as_biguint(), c);
        }
    }

    #[test]
    fn motzkin_examples() {
        assert_eq!(motzkin_number(0).unwrap(), 1);
        assert_eq!(motzkin_number(4).unwrap(), 9);
        assert_eq!(motzkin_number(10).unwrap(), 2188);
        for (n, &m) in MOTZKIN.iter().enumerate() {
            assert_eq!(motzkin_number(n).unwrap(), m);
        }
    }

    #[test]
    fn routes_agree_up_to_500() {
        let conv = motzkin_by_convolution(500);
        let three = motzkin_by_three_term(500);
        for n in 0..=500 {
            assert_eq!(conv[n], motzkin_by_binomial_sum(n as u64), "n = {n}");
            assert_eq!(conv[n], three[n]);
        }
    }

    #[test]
    fn large_n_uses_linear_route() {
        let m = motzkin_number(CONVOLUTION_LIMIT + 10).unwrap();
        assert!(m.ln() > 0.0);
    }

    #[test]
    fn meander_examples() {
        let w = meander_table(10);
        assert_eq!(w.get(2, 0), 2);
        assert_eq!(w.get(1, 1), 1);
        assert_eq!(w.get(0, 0), 1);
        assert_eq!(w.get(0, 1), 0);
        assert_eq!(w.get(10, 0), 2188);
        assert_eq!(w.get(3, 5), 0);
    }

    #[test]
    fn meander_row_matches_table() {
        let t = meander_table(30);
        for m in [0, 1, 7, 30] {
            let row = meander_row(m);
            assert_eq!(row.len(), m + 1);
            for (h, v) in row.iter().enumerate() {
                assert_eq!(*v, t.get(m, h));
            }
        }
    }

    #[test]
    fn meander_bottom_row_is_motzkin_up_to_200() {
        let w = meander_table(200);
        let m = motzkin_by_convolution(200);
        for n in 0..=200 {
            assert_eq!(w.get_ref(n, 0).unwrap(), &m[n]);
        }
    }
}
