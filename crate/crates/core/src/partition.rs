//! Pair partitions of finite index sets and the bijection between Motzkin
//! paths and non-crossing pair partitions of subsets of `{1, .., n}`.
//!
//! Indices are 1-based throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::{MotzkinPath, Step};

/// A perfect matching of `support`. Pairs are stored as `(i, j)` with `i < j`,
/// sorted by `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairPartition {
    support: Vec<usize>,
    pairs: Vec<(usize, usize)>,
}

impl PairPartition {
    pub fn empty() -> Self {
        PairPartition { support: Vec::new(), pairs: Vec::new() }
    }

    /// Build from pairs; the support is their union. Pairs may be given in
    /// either orientation and any order.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut norm: Vec<(usize, usize)> = Vec::new();
        for (a, b) in pairs {
            if a == b {
                return Err(Error::InvalidPartition(format!("degenerate pair ({a}, {b})")));
            }
            if a == 0 || b == 0 {
                return Err(Error::InvalidPartition("indices are 1-based".into()));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        let mut support: Vec<usize> = norm.iter().flat_map(|&(i, j)| [i, j]).collect();
        support.sort_unstable();
        if support.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPartition("pairs are not disjoint".into()));
        }
        Ok(PairPartition { support, pairs: norm })
    }

    /// Build and check that the union of the pairs is exactly `support`.
    pub fn with_support(support: &[usize], pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let p = Self::from_pairs(pairs)?;
        let mut s = support.to_vec();
        s.sort_unstable();
        s.dedup();
        if s != p.support {
            return Err(Error::InvalidPartition("pairs do not cover the support".into()));
        }
        Ok(p)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// True iff no two pairs interleave as `i < i' < j < j'`.
pub fn is_noncrossing(partition: &PairPartition) -> bool {
    // Scanning the support left to right, a pair's closer must match the
    // most recent unclosed opener.
    let n = partition.support.last().copied().unwrap_or(0);
    let mut partner = vec![0usize; n + 1];
    for &(i, j) in &partition.pairs {
        partner[i] = j;
        partner[j] = i;
    }
    let mut stack: Vec<usize> = Vec::new();
    for &k in &partition.support {
        if partner[k] > k {
            stack.push(k);
        } else if stack.pop() != Some(partner[k]) {
            return false;
        }
    }
    true
}

/// Non-level steps paired by Dyck matching (ascent with its matching descent).
pub fn path_to_partition(path: &MotzkinPath) -> PairPartition {
    let mut stack: Vec<usize> = Vec::new();
    let mut pairs = Vec::new();
    let mut support = Vec::new();
    for (idx, s) in path.steps().iter().enumerate() {
        let i = idx + 1;
        match s {
            Step::Ascent => {
                stack.push(i);
                support.push(i);
            }
            Step::Descent => {
                let open = stack.pop().expect("valid path has a matching ascent");
                pairs.push((open, i));
                support.push(i);
            }
            Step::Level => {}
        }
    }
    pairs.sort_unstable();
    PairPartition { support, pairs }
}

/// Inverse of [`path_to_partition`]: ascent at each opener, descent at each
/// closer, level elsewhere.
pub fn partition_to_path(n: usize, partition: &PairPartition) -> Result<MotzkinPath> {
    if let Some(&max) = partition.support.last() {
        if max > n {
            return Err(Error::InvalidPartition(format!("index {max} exceeds n = {n}")));
        }
    }
    if !is_noncrossing(partition) {
        return Err(Error::CrossingPartition);
    }
    let mut steps = vec![Step::Level; n];
    for &(i, j) in &partition.pairs {
        steps[i - 1] = Step::Ascent;
        steps[j - 1] = Step::Descent;
    }
    Ok(MotzkinPath::from_steps_unchecked(steps))
}

/// Every non-crossing pair partition of the index set `support`.
pub fn enumerate_nc2(support: &[usize]) -> Result<std::vec::IntoIter<PairPartition>> {
    let mut s = support.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() % 2 == 1 {
        return Err(Error::OddSupport(s.len()));
    }
    let mut out = Vec::new();
    let mut acc = Vec::with_capacity(s.len() / 2);
    nc2_rec(&s, &mut acc, &mut |pairs| {
        let mut pairs = pairs.to_vec();
        pairs.sort_unstable();
        out.push(PairPartition { support: s.clone(), pairs });
    });
    Ok(out.into_iter())
}

/// Calls `emit` once per non-crossing pairing of `s`. The first element is
/// matched with `s[j]` for odd `j`; the inside and outside are paired
/// independently.
pub(crate) fn nc2_rec(s: &[usize], acc: &mut Vec<(usize, usize)>, emit: &mut dyn FnMut(&[(usize, usize)])) {
    if s.is_empty() {
        emit(acc);
        return;
    }
    for j in (1..s.len()).step_by(2) {
        acc.push((s[0], s[j]));
        let inside = &s[1..j];
        let outside = &s[j + 1..];
        let mark = acc.len();
        nc2_rec(inside, acc, &mut |partial| {
            let mut inner = partial.to_vec();
            nc2_rec(outside, &mut inner, emit);
        });
        acc.truncate(mark - 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::catalan;
    use crate::path::enumerate_paths;

    #[test]
    fn noncrossing_examples() {
        assert!(is_noncrossing(&PairPartition::from_pairs([(1, 2), (3, 4)]).unwrap()));
        assert!(!is_noncrossing(&PairPartition::from_pairs([(1, 3), (2, 4)]).unwrap()));
        assert!(is_noncrossing(&PairPartition::from_pairs([(1, 6), (2, 3), (4, 5)]).unwrap()));
        assert!(is_noncrossing(&PairPartition::empty()));
    }

    #[test]
    fn noncrossing_matches_brute_force_pair_check() {
        for part in enumerate_all_pairings(&[1, 2, 3, 4, 5, 6, 7, 8]) {
            let brute = !part.pairs().iter().any(|&(i, j)| {
                part.pairs().iter().any(|&(i2, j2)| i < i2 && i2 < j && j < j2)
            });
            assert_eq!(is_noncrossing(&part), brute, "{:?}", part.pairs());
        }
    }

    fn enumerate_all_pairings(s: &[usize]) -> Vec<PairPartition> {
        fn rec(rest: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<PairPartition>) {
            if rest.is_empty() {
                out.push(PairPartition::from_pairs(acc.clone()).unwrap());
                return;
            }
            for j in 1..rest.len() {
                acc.push((rest[0], rest[j]));
                let remaining: Vec<usize> =
                    rest[1..].iter().copied().filter(|&x| x != rest[j]).collect();
                rec(&remaining, acc, out);
                acc.pop();
            }
        }
        let mut out = Vec::new();
        rec(s, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn path_to_partition_examples() {
        let p: MotzkinPath = "LLL".parse().unwrap();
        let part = path_to_partition(&p);
        assert!(part.support().is_empty() && part.is_empty());

        let p = MotzkinPath::from_values(&[1, -1, 0]).unwrap();
        let part = path_to_partition(&p);
        assert_eq!(part.support(), &[1, 2]);
        assert_eq!(part.pairs(), &[(1, 2)]);

        let p: MotzkinPath = "LUDULUDDUD".parse().unwrap();
        let part = path_to_partition(&p);
        assert_eq!(part.support(), &[2, 3, 4, 6, 7, 8, 9, 10]);
        assert_eq!(part.pairs(), &[(2, 3), (4, 8), (6, 7), (9, 10)]);
    }

    #[test]
    fn partition_to_path_examples() {
        let p = partition_to_path(2, &PairPartition::from_pairs([(1, 2)]).unwrap()).unwrap();
        assert_eq!(p.values(), vec![1, -1]);
        let p = partition_to_path(4, &PairPartition::from_pairs([(1, 4), (2, 3)]).unwrap()).unwrap();
        assert_eq!(p.values(), vec![1, 1, -1, -1]);
        assert_eq!(
            partition_to_path(4, &PairPartition::from_pairs([(1, 3), (2, 4)]).unwrap()).unwrap_err(),
            Error::CrossingPartition
        );
        assert!(partition_to_path(2, &PairPartition::from_pairs([(1, 3)]).unwrap()).is_err());
    }

    #[test]
    fn round_trip_up_to_10() {
        for n in 0..=10 {
            for p in enumerate_paths(n) {
                let part = path_to_partition(&p);
                assert!(is_noncrossing(&part));
                assert_eq!(partition_to_path(n, &part).unwrap(), p);
            }
        }
    }

    #[test]
    fn nc2_examples() {
        let e: Vec<_> = enumerate_nc2(&[]).unwrap().collect();
        assert_eq!(e.len(), 1);
        assert!(e[0].is_empty());

        let e: Vec<_> = enumerate_nc2(&[1, 2, 3, 4]).unwrap().map(|p| p.pairs().to_vec()).collect();
        assert_eq!(e, vec![vec![(1, 2), (3, 4)], vec![(1, 4), (2, 3)]]);

        assert_eq!(enumerate_nc2(&[1, 2, 3, 4, 5, 6]).unwrap().count(), 5);
        assert_eq!(enumerate_nc2(&[1, 2, 3]).unwrap_err(), Error::OddSupport(3));
    }

    #[test]
    fn nc2_counts_are_catalan() {
        let sets: [&[usize]; 4] = [&[2, 5], &[1, 3, 4, 9], &[1, 2, 3, 5, 8, 13, 21, 34], &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]];
        for s in sets {
            let all: Vec<_> = enumerate_nc2(s).unwrap().collect();
            assert_eq!(catalan(s.len() as u64 / 2), all.len() as u64);
            let mut dedup = all.clone();
            dedup.sort_by(|a, b| a.pairs().cmp(b.pairs()));
            dedup.dedup();
            assert_eq!(dedup.len(), all.len());
            for p in &all {
                assert!(is_noncrossing(p));
                assert_eq!(p.support(), s);
            }
        }
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(PairPartition::from_pairs([(1, 2), (2, 3)]).is_err());
        assert!(PairPartition::from_pairs([(0, 2)]).is_err());
        assert!(PairPartition::with_support(&[1, 2, 3, 4], [(1, 2)]).is_err());
        assert!(PairPartition::with_support(&[1, 2], [(2, 1)]).is_ok());
    }
}
