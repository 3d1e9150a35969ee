use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Strictly increasing evaluation times `s_1 < .. < s_d`, with implied
/// `s_0 = 0` and `s_{d+1} = 1`.
///
/// [`TimeGrid::new`] requires interior times; [`TimeGrid::closed`] also
/// admits the endpoints 0 and 1, for statistics evaluated at `t = 1`.
/// An empty grid (`d = 0`) is a single block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        check_increasing(&times)?;
        if let Some(&t) = times.iter().find(|&&t| t <= 0.0 || t >= 1.0) {
            return Err(domain(format!("grid time {t} is not in (0, 1)")));
        }
        Ok(TimeGrid { times })
    }

    pub fn closed(times: Vec<f64>) -> Result<Self> {
        check_increasing(&times)?;
        if let Some(&t) = times.iter().find(|&&t| !(0.0..=1.0).contains(&t)) {
            return Err(domain(format!("grid time {t} is not in [0, 1]")));
        }
        Ok(TimeGrid { times })
    }

    pub fn single_block() -> Self {
        TimeGrid { times: Vec::new() }
    }

    /// Comma-separated times, e.g. `"0.25,0.5,0.75"`; empty string for `d = 0`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::single_block());
        }
        let times = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| domain(format!("bad grid time {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn d(&self) -> usize {
        self.times.len()
    }

    pub fn is_interior(&self) -> bool {
        self.times.iter().all(|&t| t > 0.0 && t < 1.0)
    }

    /// `s_0 = 0, s_1, .., s_d, s_{d+1} = 1`.
    pub fn with_endpoints(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.times.len() + 2);
        v.push(0.0);
        v.extend_from_slice(&self.times);
        v.push(1.0);
        v
    }

    /// Block lengths `n_k = floor(n s_k) - floor(n s_{k-1})`, `k = 1..=d+1`.
    pub fn block_sizes(&self, n: usize) -> Vec<usize> {
        let idx: Vec<usize> = self
            .with_endpoints()
            .iter()
            .map(|&s| floor_index(n, s))
            .collect();
        idx.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Block durations `s_k - s_{k-1}`, `k = 1..=d+1`.
    pub fn durations(&self) -> Vec<f64> {
        self.with_endpoints().windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// `floor(n s)` clamped to `[0, n]`.
pub fn floor_index(n: usize, s: f64) -> usize {
    ((n as f64) * s).floor().clamp(0.0, n as f64) as usize
}

fn check_increasing(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(domain("grid times must be finite"));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain("grid times must be strictly increasing"));
    }
    Ok(())
}
