//! Permutations as sequences of distinct items.

use crate::error::{Error, Result};

const ABSENT: u32 = u32::MAX;

/// A sequence of distinct non-negative items with constant-time rank lookup.
///
/// The domain need not be `0..len`; a projection keeps the original item ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    seq: Vec<usize>,
    rank: Vec<u32>,
}

impl Permutation {
    pub fn new(seq: Vec<usize>) -> Result<Permutation> {
        let bound = seq.iter().max().map_or(0, |m| m + 1);
        let mut rank = vec![ABSENT; bound];
        for (i, &item) in seq.iter().enumerate() {
            if rank[item] != ABSENT {
                return Err(Error::DuplicateItem(item));
            }
            rank[item] = i as u32;
        }
        Ok(Permutation { seq, rank })
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation::new((0..n).collect()).expect("identity has distinct items")
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.seq
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.seq
    }

    pub fn contains(&self, item: usize) -> bool {
        self.rank.get(item).is_some_and(|&r| r != ABSENT)
    }

    /// 0-based rank of `item`, if it is in the domain.
    pub fn position(&self, item: usize) -> Option<usize> {
        match self.rank.get(item) {
            Some(&r) if r != ABSENT => Some(r as usize),
            _ => None,
        }
    }

    /// The order bit of `(x, y)`: `x` is not after `y`. Panics outside the domain.
    pub fn before(&self, x: usize, y: usize) -> bool {
        let rx = self.position(x).expect("x in domain");
        let ry = self.position(y).expect("y in domain");
        rx <= ry
    }

    /// True when the domain is exactly `0..n`.
    pub fn is_permutation_of(&self, n: usize) -> bool {
        self.seq.len() == n && self.rank.len() == n
    }

    pub fn reverse(&self) -> Permutation {
        let mut seq = self.seq.clone();
        seq.reverse();
        Permutation::new(seq).expect("reversal keeps items distinct")
    }

    /// Order-preserving restriction to the items of `keep` that lie in the domain.
    pub fn project(&self, keep: &[usize]) -> Permutation {
        let mut mark = vec![false; self.rank.len()];
        for &x in keep {
            if x < mark.len() {
                mark[x] = true;
            }
        }
        self.filter(|x| mark[x])
    }

    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> Permutation {
        let seq = self.seq.iter().copied().filter(|&x| keep(x)).collect();
        Permutation::new(seq).expect("a subsequence keeps items distinct")
    }

    /// `self` followed by `other`; the domains must be disjoint.
    pub fn concat(&self, other: &Permutation) -> Result<Permutation> {
        if let Some(&x) = other.seq.iter().find(|&&x| self.contains(x)) {
            return Err(Error::DomainsOverlap(x));
        }
        let mut seq = self.seq.clone();
        seq.extend_from_slice(&other.seq);
        Permutation::new(seq)
    }
}
