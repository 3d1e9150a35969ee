//! Motzkin paths, their counting processes and exhaustive enumeration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// One step of a lattice path. The variant order is the enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    Descent,
    Level,
    Ascent,
}

impl Step {
    pub const ALL: [Step; 3] = [Step::Descent, Step::Level, Step::Ascent];

    #[inline]
    pub fn value(self) -> i8 {
        match self {
            Step::Ascent => 1,
            Step::Level => 0,
            Step::Descent => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Step> {
        match v {
            1 => Some(Step::Ascent),
            0 => Some(Step::Level),
            -1 => Some(Step::Descent),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Step::Ascent => 'U',
            Step::Level => 'L',
            Step::Descent => 'D',
        }
    }

    pub fn from_char(c: char) -> Option<Step> {
        match c {
            'U' => Some(Step::Ascent),
            'L' => Some(Step::Level),
            'D' => Some(Step::Descent),
            _ => None,
        }
    }

    #[inline]
    pub fn is_ascent(self) -> bool {
        self == Step::Ascent
    }

    #[inline]
    pub fn is_descent(self) -> bool {
        self == Step::Descent
    }

    #[inline]
    pub fn is_level(self) -> bool {
        self == Step::Level
    }
}

/// A validated Motzkin path: prefix sums never negative, total sum zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MotzkinPath {
    steps: Vec<Step>,
}

/// Check the Motzkin constraints and wrap the steps.
///
/// `PrefixNegative` carries the 1-based index of the first offending step.
pub fn validate(steps: Vec<Step>) -> Result<MotzkinPath> {
    let mut height: i64 = 0;
    for (i, s) in steps.iter().enumerate() {
        height += i64::from(s.value());
        if height < 0 {
            return Err(Error::PrefixNegative(i + 1));
        }
    }
    if height != 0 {
        return Err(Error::NonzeroEndpoint(height));
    }
    Ok(MotzkinPath { steps })
}

impl MotzkinPath {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        validate(steps)
    }

    pub fn from_values(values: &[i64]) -> Result<Self> {
        let steps = values
            .iter()
            .map(|&v| Step::from_value(v).ok_or_else(|| Error::Parse(format!("bad step value {v}"))))
            .collect::<Result<Vec<_>>>()?;
        validate(steps)
    }

    /// Caller guarantees the Motzkin constraints.
    pub(crate) fn from_steps_unchecked(steps: Vec<Step>) -> Self {
        debug_assert!(validate(steps.clone()).is_ok());
        MotzkinPath { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn into_steps(self) -> Vec<Step> {
        self.steps
    }

    pub fn values(&self) -> Vec<i8> {
        self.steps.iter().map(|s| s.value()).collect()
    }

    /// Heights after each step, starting with the height 0 before step 1.
    pub fn heights(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut h: i64 = 0;
        out.push(0);
        for s in &self.steps {
            h += i64::from(s.value());
            out.push(h as u32);
        }
        out
    }

    pub fn max_height(&self) -> u32 {
        self.heights().into_iter().max().unwrap_or(0)
    }

    /// `'U'`/`'L'`/`'D'` text form.
    pub fn to_text(&self) -> String {
        self.steps.iter().map(|s| s.to_char()).collect()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({ "n": self.len(), "steps": self.values() })
    }
}

impl fmt::Display for MotzkinPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for MotzkinPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let steps = s
            .trim()
            .chars()
            .map(|c| Step::from_char(c).ok_or_else(|| Error::Parse(format!("bad step character {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        validate(steps)
    }
}

#[derive(Serialize, Deserialize)]
struct PathJson {
    n: usize,
    steps: Vec<i64>,
}

impl Serialize for MotzkinPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PathJson {
            n: self.len(),
            steps: self.steps.iter().map(|s| i64::from(s.value())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MotzkinPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = PathJson::deserialize(deserializer)?;
        if raw.n != raw.steps.len() {
            return Err(serde::de::Error::custom(format!(
                "n = {} but {} steps given",
                raw.n,
                raw.steps.len()
            )));
        }
        MotzkinPath::from_values(&raw.steps).map_err(serde::de::Error::custom)
    }
}

/// Counts of ascents, descents and levels among the first `index` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountingTriple {
    pub ascents: usize,
    pub descents: usize,
    pub levels: usize,
    pub index: usize,
}

/// `(A_n(t), D_n(t), L_n(t), floor(n t))` for `t` in `[0, 1]`.
pub fn counting_processes(path: &MotzkinPath, t: f64) -> Result<CountingTriple> {
    let index = prefix_index(path.len(), t)?;
    Ok(counting_at_index(path, index))
}

/// `floor(n t)` with the domain check on `t`.
pub fn prefix_index(n: usize, t: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain(format!("time {t} outside [0, 1]")));
    }
    Ok(((n as f64) * t).floor().min(n as f64) as usize)
}

/// Counts over the first `index` steps; `index` is clamped to the path length.
pub fn counting_at_index(path: &MotzkinPath, index: usize) -> CountingTriple {
    let index = index.min(path.len());
    let mut triple = CountingTriple { ascents: 0, descents: 0, levels: 0, index };
    for s in &path.steps[..index] {
        match s {
            Step::Ascent => triple.ascents += 1,
            Step::Descent => triple.descents += 1,
            Step::Level => triple.levels += 1,
        }
    }
    triple
}

/// Iterator over all Motzkin paths of length `n` in lexicographic order
/// (Descent < Level < Ascent).
pub fn enumerate_paths(n: usize) -> PathEnumerator {
    PathEnumerator { n, current: None, done: false }
}

#[derive(Debug, Clone)]
pub struct PathEnumerator {
    n: usize,
    current: Option<Vec<Step>>,
    done: bool,
}

/// Lexicographically smallest completion of `remaining` steps from `height`.
fn smallest_completion(out: &mut Vec<Step>, height: usize, remaining: usize) {
    debug_assert!(height <= remaining);
    out.extend(std::iter::repeat_n(Step::Descent, height));
    out.extend(std::iter::repeat_n(Step::Level, remaining - height));
}

impl PathEnumerator {
    fn advance(&self, cur: &[Step]) -> Option<Vec<Step>> {
        let n = self.n;
        let mut heights = Vec::with_capacity(n + 1);
        let mut h: i64 = 0;
        heights.push(0i64);
        for s in cur {
            h += i64::from(s.value());
            heights.push(h);
        }
        for i in (0..n).rev() {
            let before = heights[i];
            let remaining_after = (n - i - 1) as i64;
            for cand in Step::ALL.iter().copied().filter(|&c| c > cur[i]) {
                let after = before + i64::from(cand.value());
                if after >= 0 && after <= remaining_after {
                    let mut next = Vec::with_capacity(n);
                    next.extend_from_slice(&cur[..i]);
                    next.push(cand);
                    smallest_completion(&mut next, after as usize, remaining_after as usize);
                    return Some(next);
                }
            }
        }
        None
    }
}

impl Iterator for PathEnumerator {
    type Item = MotzkinPath;

    fn next(&mut self) -> Option<MotzkinPath> {
        if self.done {
            return None;
        }
        let next = match &self.current {
            None => {
                let mut first = Vec::with_capacity(self.n);
                smallest_completion(&mut first, 0, self.n);
                Some(first)
            }
            Some(cur) => self.advance(cur),
        };
        match next {
            Some(steps) => {
                self.current = Some(steps.clone());
                Some(MotzkinPath::from_steps_unchecked(steps))
            }
            None => {
                self.done = true;
                None
            }
        }
    }
}
