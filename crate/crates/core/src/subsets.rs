//! Subsets of `[n] = {1, ..., n}` for `n <= 63`, stored as bitmasks.

use std::fmt;

use serde::{Serialize, Serializer};

pub const MAX_N: usize = 63;

/// A set of 1-based column indices. Bit `i - 1` is set iff `i` is a member.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndexSet(u64);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_mask(mask: u64) -> Self {
        IndexSet(mask)
    }

    /// Panics on index 0 or indices above [`MAX_N`].
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut mask = 0u64;
        for i in indices {
            assert!((1..=MAX_N).contains(&i), "index {i} out of range");
            mask |= 1 << (i - 1);
        }
        IndexSet(mask)
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_N);
        IndexSet(if n == 0 { 0 } else { u64::MAX >> (64 - n) })
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=MAX_N).contains(&i) && self.0 >> (i - 1) & 1 == 1
    }

    pub fn insert(self, i: usize) -> Self {
        IndexSet(self.0 | 1 << (i - 1))
    }

    pub fn remove(self, i: usize) -> Self {
        IndexSet(self.0 & !(1 << (i - 1)))
    }

    pub fn union(self, other: Self) -> Self {
        IndexSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn max_index(self) -> Option<usize> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros() as usize)
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            (rest != 0).then(|| {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                i + 1
            })
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Ordering of sorted index lists, used for all reported set lists.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// All `k`-subsets of `[n]`, lexicographic on sorted index lists.
pub fn combinations(n: usize, k: usize) -> Combinations {
    assert!(n <= MAX_N);
    Combinations { n, idx: (k <= n).then(|| (1..=k).collect()) }
}

pub struct Combinations {
    n: usize,
    idx: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = IndexSet;

    fn next(&mut self) -> Option<IndexSet> {
        let idx = self.idx.as_mut()?;
        let out = IndexSet::from_indices(idx.iter().copied());
        let k = idx.len();
        // Advance the rightmost index that still has room.
        match (0..k).rev().find(|&j| idx[j] < self.n - (k - 1 - j)) {
            Some(j) => {
                idx[j] += 1;
                for l in j + 1..k {
                    idx[l] = idx[l - 1] + 1;
                }
            }
            None => self.idx = None,
        }
        Some(out)
    }
}

pub fn binomial_u64(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_lexicographic() {
        let all: Vec<Vec<usize>> = combinations(4, 2).map(IndexSet::to_vec).collect();
        assert_eq!(all, vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]);
        assert_eq!(combinations(3, 0).collect::<Vec<_>>(), vec![IndexSet::EMPTY]);
        assert_eq!(combinations(3, 4).count(), 0);
        assert_eq!(combinations(10, 4).count(), 210);
    }

    #[test]
    fn set_ops() {
        let s = IndexSet::from_indices([1, 2, 6]);
        assert_eq!(s.to_string(), "{1,2,6}");
        assert_eq!(s.len(), 3);
        assert!(s.contains(6) && !s.contains(3) && !s.contains(0));
        assert_eq!(s.insert(3).remove(1).to_vec(), vec![2, 3, 6]);
        assert_eq!(IndexSet::full(3).to_vec(), vec![1, 2, 3]);
        assert_eq!(s.max_index(), Some(6));
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,2,6]");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_u64(8, 4), 70);
        assert_eq!(binomial_u64(3, 5), 0);
    }
}
