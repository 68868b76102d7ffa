use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported item count. Several routines enumerate all `n!`
/// permutations (and all ordered partitions), so `n` stays small.
pub const MAX_ITEMS: usize = 8;

/// `n!` as a `usize`. Panics if `n > 20` (would overflow `u64` anyway well
/// before that on 64-bit targets; callers stay within `MAX_ITEMS`).
pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Position of a permutation in the lexicographic order of rank vectors,
/// in `0..n!`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct PermIndex(pub usize);

/// A total ranking of `n` items.
///
/// `ranks[i]` is the rank (1 = best) assigned to item `i`, so the vector
/// `[2, 1, 3]` says item 0 is second, item 1 first, item 2 third. Stored as
/// ranks rather than as an item ordering because every distance used here is
/// defined on rank differences.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    ranks: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from a rank vector; each of `1..=n` must appear
    /// exactly once.
    pub fn from_ranks(ranks: Vec<usize>) -> Result<Self> {
        let n = ranks.len();
        if n == 0 || n > MAX_ITEMS {
            return Err(Error::ItemCountOutOfRange {
                got: n,
                min: 1,
                max: MAX_ITEMS,
            });
        }
        let mut seen = vec![false; n];
        for &r in &ranks {
            if r < 1 || r > n {
                return Err(Error::InvalidPermutation(format!(
                    "rank {r} out of range 1..={n}"
                )));
            }
            if seen[r - 1] {
                return Err(Error::InvalidPermutation(format!("rank {r} repeated")));
            }
            seen[r - 1] = true;
        }
        Ok(Self { ranks })
    }

    /// The identity ranking: item `i` gets rank `i + 1`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_ranks((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Rank of item `i` (1-based).
    pub fn rank_of(&self, item: usize) -> usize {
        self.ranks[item]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Items listed best-first: element `k` is the item holding rank `k + 1`.
    pub fn items_by_rank(&self) -> Vec<usize> {
        let mut items = vec![0; self.ranks.len()];
        for (item, &r) in self.ranks.iter().enumerate() {
            items[r - 1] = item;
        }
        items
    }

    /// The reversed ranking: rank `r` becomes `n + 1 - r`.
    pub fn reverse(&self) -> Self {
        let n = self.ranks.len();
        Self {
            ranks: self.ranks.iter().map(|&r| n + 1 - r).collect(),
        }
    }

    /// Exchanges the items currently holding ranks `r1` and `r2` (1-based).
    pub fn swap_ranks(&self, r1: usize, r2: usize) -> Result<Self> {
        let n = self.ranks.len();
        for r in [r1, r2] {
            if r < 1 || r > n {
                return Err(Error::InvalidParameter(format!(
                    "rank {r} out of range 1..={n}"
                )));
            }
        }
        let mut ranks = self.ranks.clone();
        let i = self.ranks.iter().position(|&r| r == r1).unwrap();
        let j = self.ranks.iter().position(|&r| r == r2).unwrap();
        ranks.swap(i, j);
        Self::from_ranks(ranks)
    }

    /// Lexicographic index of this rank vector among all of length `n`.
    pub fn index(&self) -> PermIndex {
        let n = self.ranks.len();
        let mut idx = 0;
        for i in 0..n {
            let smaller_later = self.ranks[i + 1..]
                .iter()
                .filter(|&&r| r < self.ranks[i])
                .count();
            idx += smaller_later * factorial(n - 1 - i);
        }
        PermIndex(idx)
    }

    /// Inverse of [`Permutation::index`].
    pub fn from_index(n: usize, index: PermIndex) -> Result<Self> {
        if n == 0 || n > MAX_ITEMS {
            return Err(Error::ItemCountOutOfRange {
                got: n,
                min: 1,
                max: MAX_ITEMS,
            });
        }
        let total = factorial(n);
        if index.0 >= total {
            return Err(Error::InvalidParameter(format!(
                "index {} out of range for n = {n}",
                index.0
            )));
        }
        let mut remaining: Vec<usize> = (1..=n).collect();
        let mut idx = index.0;
        let mut ranks = Vec::with_capacity(n);
        for i in 0..n {
            let f = factorial(n - 1 - i);
            let pos = idx / f;
            idx %= f;
            ranks.push(remaining.remove(pos));
        }
        Self::from_ranks(ranks)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(ranks: Vec<usize>) -> Result<Self> {
        Self::from_ranks(ranks)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.ranks
    }
}

/// All permutations of `n` items in lexicographic rank-vector order, so that
/// `enumerate(n)[k].index() == PermIndex(k)`.
pub fn enumerate(n: usize) -> Result<Vec<Permutation>> {
    if n == 0 || n > MAX_ITEMS {
        return Err(Error::ItemCountOutOfRange {
            got: n,
            min: 1,
            max: MAX_ITEMS,
        });
    }
    let mut ranks: Vec<usize> = (1..=n).collect();
    let mut out = Vec::with_capacity(factorial(n));
    loop {
        out.push(Permutation {
            ranks: ranks.clone(),
        });
        if !next_lex(&mut ranks) {
            break;
        }
    }
    Ok(out)
}

/// Advances `v` to its lexicographic successor in place; returns false when
/// `v` was already the last arrangement.
fn next_lex(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factorial_small_values() {
        assert_eq!(factorial(0), 1);
        assert_eq!(factorial(1), 1);
        assert_eq!(factorial(4), 24);
        assert_eq!(factorial(8), 40320);
    }

    #[test]
    fn rejects_bad_rank_vectors() {
        assert!(Permutation::from_ranks(vec![]).is_err());
        assert!(Permutation::from_ranks(vec![1, 1, 3]).is_err());
        assert!(Permutation::from_ranks(vec![0, 1, 2]).is_err());
        assert!(Permutation::from_ranks(vec![1, 2, 4]).is_err());
        assert!(Permutation::from_ranks((1..=9).collect()).is_err());
    }

    #[test]
    fn reverse_flips_ranks() {
        let p = Permutation::from_ranks(vec![2, 3, 1]).unwrap();
        assert_eq!(p.reverse().ranks(), &[2, 1, 3]);
        assert_eq!(p.reverse().reverse(), p);
    }

    #[test]
    fn items_by_rank_inverts_ranks() {
        let p = Permutation::from_ranks(vec![2, 3, 1]).unwrap();
        assert_eq!(p.items_by_rank(), vec![2, 0, 1]);
    }

    #[test]
    fn swap_ranks_exchanges_holders() {
        let p = Permutation::from_ranks(vec![2, 3, 1]).unwrap();
        // Items at ranks 1 and 2 are items 2 and 0; after the swap item 2
        // holds rank 2 and item 0 holds rank 1.
        let q = p.swap_ranks(1, 2).unwrap();
        assert_eq!(q.ranks(), &[1, 3, 2]);
    }

    #[test]
    fn enumerate_is_lexicographic_and_indexed() {
        for n in 1..=5 {
            let all = enumerate(n).unwrap();
            assert_eq!(all.len(), factorial(n));
            for (k, p) in all.iter().enumerate() {
                assert_eq!(p.index(), PermIndex(k));
                assert_eq!(&Permutation::from_index(n, PermIndex(k)).unwrap(), p);
            }
            for w in all.windows(2) {
                assert!(w[0].ranks() < w[1].ranks());
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let p = Permutation::from_ranks(vec![2, 1, 3]).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "[2,1,3]");
        let back: Permutation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Permutation>("[1,1,2]").is_err());
    }

    proptest! {
        #[test]
        fn index_round_trips(n in 1usize..=8, seed in 0usize..40320) {
            let idx = PermIndex(seed % factorial(n));
            let p = Permutation::from_index(n, idx).unwrap();
            prop_assert_eq!(p.index(), idx);
        }

        #[test]
        fn reverse_is_involution(n in 1usize..=8, seed in 0usize..40320) {
            let idx = PermIndex(seed % factorial(n));
            let p = Permutation::from_index(n, idx).unwrap();
            prop_assert_eq!(p.reverse().reverse(), p);
        }
    }
}
