//! Exact uniform sampling of Motzkin paths.
//!
//! Three interchangeable algorithms:
//!
//! * `CycleLemma` draws the number `k` of ascents from its exact marginal,
//!   shuffles a word with `k` ascents, `k + 1` descents and `n - 2k` levels,
//!   rotates it to the unique valid cyclic shift and drops the final descent.
//!   O(n) per path after an O(n) big-integer table.
//! * `DpExact` walks left to right choosing each step with probability
//!   proportional to the number of completions, using exact big integers.
//! * `DpLogspace` is the same walk with `f64` log-counts.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bigcount::BigCount;
use crate::counting::{meander_table, MeanderTable};
use crate::error::{domain, Error, Result};
use crate::path::{MotzkinPath, Step};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMode {
    CycleLemma,
    DpExact,
    DpLogspace,
}

impl SamplerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerMode::CycleLemma => "cycle",
            SamplerMode::DpExact => "dp",
            SamplerMode::DpLogspace => "dplog",
        }
    }
}

impl std::str::FromStr for SamplerMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cycle" | "cycle_lemma" => Ok(SamplerMode::CycleLemma),
            "dp" | "dp_exact" => Ok(SamplerMode::DpExact),
            "dplog" | "dp_logspace" => Ok(SamplerMode::DpLogspace),
            other => Err(Error::Parse(format!("unknown sampler mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub mode: SamplerMode,
    pub n: usize,
}

impl SamplerConfig {
    pub fn new(n: usize, mode: SamplerMode, seed: u64) -> Self {
        SamplerConfig { seed, mode, n }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seedable 64-bit generator (ChaCha12).
///
/// Worker `w` of a run seeded with `seed` uses the stream seeded with
/// `splitmix64(seed ^ splitmix64(w + 1))`; worker streams are therefore
/// fixed by `(seed, w)` alone.
#[derive(Debug, Clone)]
pub struct RandomSource(ChaCha12Rng);

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        RandomSource(ChaCha12Rng::seed_from_u64(seed))
    }

    pub fn for_worker(seed: u64, worker: usize) -> Self {
        Self::from_seed(splitmix64(seed ^ splitmix64(worker as u64 + 1)))
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Uniform integer in `[0, bound)` by masked rejection on whole words.
pub(crate) fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    let bits = bound.bits();
    let words = bits.div_ceil(64) as usize;
    let top_bits = bits - 64 * (words as u64 - 1);
    let mask = if top_bits == 64 { u64::MAX } else { (1u64 << top_bits) - 1 };
    let mut buf = vec![0u64; words];
    loop {
        for w in buf.iter_mut() {
            *w = rng.next_u64();
        }
        buf[words - 1] &= mask;
        let x = BigUint::from_slice(
            &buf.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect::<Vec<_>>(),
        );
        if &x < bound {
            return x;
        }
    }
}

/// Number of words of length `n + 1` with `k` ascents, `k + 1` descents and
/// `n - 2k` levels: `(n+1)! / (k! (k+1)! (n-2k)!)`.
pub fn sample_k_weight(n: usize, k: usize) -> Result<BigCount> {
    if 2 * k > n {
        return Err(domain(format!("k = {k} too large for n = {n}")));
    }
    Ok(BigCount::from(multinomial_weight(n as u64, k as u64)))
}

fn multinomial_weight(n: u64, k: u64) -> BigUint {
    // binom(n+1, k) * binom(n+1-k, k+1)
    crate::counting::binomial(n + 1, k) * crate::counting::binomial(n + 1 - k, k + 1)
}

/// Start index (1-based) of the unique cyclic shift of a word summing to -1
/// whose proper prefixes all stay nonnegative: one past the first position
/// where the prefix sum attains its minimum, taken cyclically.
pub fn cycle_rotation_point(steps: &[Step]) -> Result<usize> {
    let total: i64 = steps.iter().map(|s| i64::from(s.value())).sum();
    if total != -1 {
        return Err(Error::BadSum(total));
    }
    let mut sum = 0i64;
    let mut min = i64::MAX;
    let mut arg = 0usize;
    for (i, s) in steps.iter().enumerate() {
        sum += i64::from(s.value());
        if sum < min {
            min = sum;
            arg = i + 1;
        }
    }
    Ok(arg % steps.len() + 1)
}

/// Exact marginal of `k` for the cycle-lemma sampler.
#[derive(Debug, Clone)]
struct CycleLemmaTable {
    cumulative: Vec<BigUint>,
}

impl CycleLemmaTable {
    fn new(n: usize) -> Self {
        let n = n as u64;
        let mut cumulative = Vec::with_capacity(n as usize / 2 + 1);
        let mut acc = BigUint::zero();
        // weight(k+1) / weight(k) = (n-2k)(n-2k-1) / ((k+1)(k+2))
        let mut w = multinomial_weight(n, 0);
        for k in 0..=n / 2 {
            if k > 0 {
                let j = k - 1;
                w = w * ((n - 2 * j) * (n - 2 * j - 1)) / ((j + 1) * (j + 2));
            }
            acc += &w;
            cumulative.push(acc.clone());
        }
        CycleLemmaTable { cumulative }
    }

    fn draw_k<R: RngCore + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.cumulative.last().expect("nonempty");
        let u = uniform_below(rng, total);
        self.cumulative.partition_point(|c| c <= &u)
    }
}

/// `ln W(m, h)` for `h <= m`.
#[derive(Debug, Clone)]
struct LogMeanderTable {
    rows: Vec<Vec<f64>>,
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl LogMeanderTable {
    fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        rows.push(vec![0.0]);
        for m in 1..=n {
            let prev = &rows[m - 1];
            let at = |h: usize| prev.get(h).copied().unwrap_or(f64::NEG_INFINITY);
            let row = (0..=m)
                .map(|h| {
                    let mut v = log_add(at(h + 1), at(h));
                    if h > 0 {
                        v = log_add(v, at(h - 1));
                    }
                    v
                })
                .collect();
            rows.push(row);
        }
        LogMeanderTable { rows }
    }

    fn get(&self, m: usize, h: usize) -> f64 {
        self.rows
            .get(m)
            .and_then(|r| r.get(h))
            .copied()
            .unwrap_or(f64::NEG_INFINITY)
    }
}

#[derive(Debug, Clone)]
enum Engine {
    Cycle(CycleLemmaTable),
    Exact(MeanderTable),
    Log(LogMeanderTable),
}

/// A sampler for a fixed `n` and mode; the precomputed tables are shared
/// across draws and threads.
#[derive(Debug, Clone)]
pub struct UniformSampler {
    n: usize,
    mode: SamplerMode,
    engine: Engine,
}

const STEP_ORDER: [Step; 3] = [Step::Descent, Step::Level, Step::Ascent];

impl UniformSampler {
    pub fn new(n: usize, mode: SamplerMode) -> Self {
        let engine = match mode {
            SamplerMode::CycleLemma => Engine::Cycle(CycleLemmaTable::new(n)),
            SamplerMode::DpExact => Engine::Exact(meander_table(n)),
            SamplerMode::DpLogspace => Engine::Log(LogMeanderTable::new(n)),
        };
        UniformSampler { n, mode, engine }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> SamplerMode {
        self.mode
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> MotzkinPath {
        match &self.engine {
            Engine::Cycle(table) => self.sample_cycle(table, rng),
            Engine::Exact(table) => self.sample_dp_exact(table, rng),
            Engine::Log(table) => self.sample_dp_log(table, rng),
        }
    }

    fn sample_cycle<R: RngCore + ?Sized>(&self, table: &CycleLemmaTable, rng: &mut R) -> MotzkinPath {
        let n = self.n;
        let k = table.draw_k(rng);
        let mut word = Vec::with_capacity(n + 1);
        word.extend(std::iter::repeat_n(Step::Ascent, k));
        word.extend(std::iter::repeat_n(Step::Descent, k + 1));
        word.extend(std::iter::repeat_n(Step::Level, n - 2 * k));
        word.shuffle(rng);
        let r = cycle_rotation_point(&word).expect("word sums to -1");
        word.rotate_left(r - 1);
        let last = word.pop();
        debug_assert_eq!(last, Some(Step::Descent));
        MotzkinPath::from_steps_unchecked(word)
    }

    fn sample_dp_exact<R: RngCore + ?Sized>(&self, table: &MeanderTable, rng: &mut R) -> MotzkinPath {
        let n = self.n;
        let mut steps = Vec::with_capacity(n);
        let mut h = 0usize;
        for m in 0..n {
            let rest = n - m - 1;
            let total = table.get_ref(n - m, h).expect("reachable state");
            let mut u = uniform_below(rng, total);
            for step in STEP_ORDER {
                let Some(next) = next_height(h, step) else { continue };
                let Some(w) = table.get_ref(rest, next) else { continue };
                if &u < w {
                    steps.push(step);
                    h = next;
                    break;
                }
                u -= w;
            }
        }
        MotzkinPath::from_steps_unchecked(steps)
    }

    fn sample_dp_log<R: RngCore + ?Sized>(&self, table: &LogMeanderTable, rng: &mut R) -> MotzkinPath {
        let n = self.n;
        let mut steps = Vec::with_capacity(n);
        let mut h = 0usize;
        for m in 0..n {
            let probs = log_step_probabilities(table, n, m, h);
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, step) in STEP_ORDER.into_iter().enumerate() {
                if probs[i] == 0.0 {
                    continue;
                }
                acc += probs[i];
                chosen = Some(step);
                if u < acc {
                    break;
                }
            }
            let step = chosen.expect("some step is feasible");
            h = next_height(h, step).expect("feasible");
            steps.push(step);
        }
        MotzkinPath::from_steps_unchecked(steps)
    }

    /// Conditional probabilities of (Descent, Level, Ascent) as step `m + 1`
    /// from height `h`. Only defined for the DP modes.
    pub fn step_probabilities(&self, m: usize, h: usize) -> Option<[f64; 3]> {
        if m >= self.n || h > self.n - m {
            return None;
        }
        match &self.engine {
            Engine::Cycle(_) => None,
            Engine::Exact(table) => {
                let total = table.get_ref(self.n - m, h)?;
                if total.is_zero() {
                    return None;
                }
                let rest = self.n - m - 1;
                let mut out = [0.0; 3];
                for (i, step) in STEP_ORDER.into_iter().enumerate() {
                    if let Some(w) = next_height(h, step).and_then(|nh| table.get_ref(rest, nh)) {
                        out[i] = big_ratio(w, total);
                    }
                }
                Some(out)
            }
            Engine::Log(table) => {
                if table.get(self.n - m, h) == f64::NEG_INFINITY {
                    return None;
                }
                Some(log_step_probabilities(table, self.n, m, h))
            }
        }
    }
}

fn log_step_probabilities(table: &LogMeanderTable, n: usize, m: usize, h: usize) -> [f64; 3] {
    let rest = n - m - 1;
    let total = table.get(n - m, h);
    let mut out = [0.0; 3];
    for (i, step) in STEP_ORDER.into_iter().enumerate() {
        if let Some(nh) = next_height(h, step) {
            let w = table.get(rest, nh);
            if w > f64::NEG_INFINITY {
                out[i] = (w - total).exp();
            }
        }
    }
    out
}

fn next_height(h: usize, step: Step) -> Option<usize> {
    match step {
        Step::Ascent => Some(h + 1),
        Step::Level => Some(h),
        Step::Descent => h.checked_sub(1),
    }
}

/// `a / b` for `a <= b`, correctly rounded up to a few ulps.
fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let q: BigUint = (a << 128u32) / b;
    q.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(128)
}

/// One uniform Motzkin path of length `config.n`.
pub fn sample_uniform(config: &SamplerConfig, rng: &mut RandomSource) -> MotzkinPath {
    UniformSampler::new(config.n, config.mode).sample(rng)
}

/// Split `total` draws over `workers` streams: the first `total % workers`
/// workers take one extra draw.
pub fn worker_quotas(total: usize, workers: usize) -> Vec<usize> {
    let workers = workers.max(1);
    (0..workers)
        .map(|w| total / workers + usize::from(w < total % workers))
        .collect()
}

/// `count` paths drawn on `workers` derived streams and concatenated in
/// worker order. Deterministic in `(config, count, workers)`.
pub fn sample_many(config: &SamplerConfig, count: usize, workers: usize) -> Vec<MotzkinPath> {
    let sampler = UniformSampler::new(config.n, config.mode);
    worker_quotas(count, workers)
        .into_par_iter()
        .enumerate()
        .map(|(w, quota)| {
            let mut rng = RandomSource::for_worker(config.seed, w);
            (0..quota).map(|_| sampler.sample(&mut rng)).collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}
