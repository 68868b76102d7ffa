use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::perm::{enumerate, factorial, Permutation, MAX_ITEMS};

/// Which Hausdorff extension of Kendall tau to evaluate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HausdorffVariant {
    /// Directed: adversarial over the second argument's ties only.
    #[default]
    Ns,
    /// Average of the two directed values; a genuine (pseudo)metric.
    Half,
}

/// An ordered partition of the items into ties ("buckets"): items in earlier
/// buckets are preferred, items sharing a bucket are tied.
///
/// Items are 0-based internally; the JSON form uses 1-based ids, e.g.
/// `[[3],[1,2]]` puts item 3 first and ties items 1 and 2 behind it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct BucketRanking {
    n: usize,
    buckets: Vec<Vec<usize>>,
}

impl BucketRanking {
    /// Builds a bucket ranking from 0-based item buckets; they must be
    /// non-empty and partition `0..n`. Buckets are stored sorted so equal
    /// rankings compare equal.
    pub fn new(n: usize, buckets: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 || n > MAX_ITEMS {
            return Err(Error::ItemCountOutOfRange {
                got: n,
                min: 1,
                max: MAX_ITEMS,
            });
        }
        let mut seen = vec![false; n];
        let mut sorted = Vec::with_capacity(buckets.len());
        for bucket in buckets {
            if bucket.is_empty() {
                return Err(Error::InvalidBucketRanking("empty bucket".into()));
            }
            for &item in &bucket {
                if item >= n {
                    return Err(Error::InvalidBucketRanking(format!(
                        "item {item} out of range 0..{n}"
                    )));
                }
                if seen[item] {
                    return Err(Error::InvalidBucketRanking(format!(
                        "item {item} appears twice"
                    )));
                }
                seen[item] = true;
            }
            let mut bucket = bucket;
            bucket.sort_unstable();
            sorted.push(bucket);
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidBucketRanking(
                "buckets do not cover all items".into(),
            ));
        }
        Ok(Self { n, buckets: sorted })
    }

    /// The all-singletons bucket ranking ordered by the permutation's ranks.
    pub fn from_permutation(sigma: &Permutation) -> Self {
        Self {
            n: sigma.len(),
            buckets: sigma.items_by_rank().into_iter().map(|i| vec![i]).collect(),
        }
    }

    /// All items tied in one bucket.
    pub fn single_bucket(n: usize) -> Result<Self> {
        Self::new(n, vec![(0..n).collect()])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of buckets.
    pub fn k(&self) -> usize {
        self.buckets.len()
    }

    pub fn buckets(&self) -> &[Vec<usize>] {
        &self.buckets
    }

    /// Index of the bucket holding `item`.
    pub fn bucket_of(&self, item: usize) -> usize {
        self.buckets
            .iter()
            .position(|b| b.contains(&item))
            .expect("item in range by construction")
    }

    /// Twice the mean in-bucket rank of `item`: items before its bucket plus
    /// the average position inside it. Doubled so the value stays an integer.
    pub fn mean_rank_doubled(&self, item: usize) -> usize {
        let mut offset = 0;
        for bucket in &self.buckets {
            if bucket.contains(&item) {
                return 2 * offset + bucket.len() + 1;
            }
            offset += bucket.len();
        }
        unreachable!("item in range by construction")
    }

    /// Pairwise order encoding: for each pair i < j the entry is +1/2 when i
    /// precedes j, 0 when tied, -1/2 when j precedes i.
    pub fn profile(&self) -> ProfileVector {
        let mut half_units = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            let bi = self.bucket_of(i);
            for j in i + 1..self.n {
                let bj = self.bucket_of(j);
                half_units.push(match bi.cmp(&bj) {
                    std::cmp::Ordering::Less => 1,
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Greater => -1,
                });
            }
        }
        ProfileVector {
            n: self.n,
            half_units,
        }
    }

    /// All permutations that extend the strict part of this ranking: every
    /// strictly ordered pair keeps its order, ties break freely. Exactly
    /// the product of the bucket-size factorials many.
    pub fn compatible_permutations(&self) -> Result<Vec<Permutation>> {
        let order = self.pair_order();
        let perms = enumerate(self.n)?
            .into_iter()
            .filter(|sigma| {
                for i in 0..self.n {
                    for j in i + 1..self.n {
                        let o = order[pair_index(self.n, i, j)];
                        if o != 0 {
                            let s = if sigma.rank_of(i) < sigma.rank_of(j) { 1 } else { -1 };
                            if s != o {
                                return false;
                            }
                        }
                    }
                }
                true
            })
            .collect();
        Ok(perms)
    }

    /// True iff every permutation compatible with `self` is compatible with
    /// `other`, i.e. `self` only refines (or equals) `other`'s ties.
    pub fn is_stricter(&self, other: &Self) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let a = self.pair_order();
        let b = other.pair_order();
        Ok(a.iter().zip(&b).all(|(&sa, &sb)| sb == 0 || sa == sb))
    }

    /// Per-pair order signs (+1, 0, -1) indexed by [`pair_index`].
    fn pair_order(&self) -> Vec<i8> {
        self.profile().half_units
    }
}

impl TryFrom<Vec<Vec<usize>>> for BucketRanking {
    type Error = Error;

    /// Accepts the external 1-based item ids.
    fn try_from(buckets: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = buckets.iter().map(|b| b.len()).sum();
        let shifted = buckets
            .into_iter()
            .map(|b| {
                b.into_iter()
                    .map(|item| {
                        item.checked_sub(1).ok_or_else(|| {
                            Error::InvalidBucketRanking("item ids are 1-based".into())
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, shifted)
    }
}

impl From<BucketRanking> for Vec<Vec<usize>> {
    /// Emits the external 1-based item ids.
    fn from(pi: BucketRanking) -> Self {
        pi.buckets
            .into_iter()
            .map(|b| b.into_iter().map(|item| item + 1).collect())
            .collect()
    }
}

/// Per-pair tie/order encoding of a bucket ranking with entries in
/// {-1/2, 0, +1/2}, stored as integer half-units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileVector {
    n: usize,
    half_units: Vec<i8>,
}

impl ProfileVector {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry for the pair `i < j` as a real value in {-1/2, 0, +1/2}.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.half_units[pair_index(self.n, i, j)] as f64 / 2.0
    }

    /// L1 distance to another profile, in pair units (each differing strict
    /// pair contributes 1, each strict-vs-tie pair contributes 1/2).
    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.l1_half_units(other) as f64 / 2.0
    }

    /// L1 distance in half-units, as an exact integer (twice `l1_distance`).
    pub fn l1_half_units(&self, other: &Self) -> i32 {
        self.half_units
            .iter()
            .zip(&other.half_units)
            .map(|(&a, &b)| (a as i32 - b as i32).abs())
            .sum()
    }
}

/// Flat index of the unordered pair `i < j` among all pairs of `0..n`.
fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn check_pair_args(p1: &BucketRanking, p2: &BucketRanking) -> Result<usize> {
    if p1.n != p2.n {
        return Err(Error::SizeMismatch {
            expected: p1.n,
            got: p2.n,
        });
    }
    if p1.n < 2 {
        return Err(Error::ItemCountOutOfRange {
            got: p1.n,
            min: 2,
            max: MAX_ITEMS,
        });
    }
    Ok(p1.n)
}

/// Unnormalized directed Hausdorff count: pairs strictly ordered oppositely
/// in the two rankings, plus pairs strict in `p1` but tied in `p2` (where an
/// adversarial tie-break of `p2` can oppose `p1`). Ties of `p1` cost nothing
/// because its tie-break is chosen defensively.
fn ns_count(p1: &BucketRanking, p2: &BucketRanking) -> usize {
    let a = p1.pair_order();
    let b = p2.pair_order();
    a.iter()
        .zip(&b)
        .filter(|&(&sa, &sb)| (sa != 0 && sb != 0 && sa != sb) || (sa != 0 && sb == 0))
        .count()
}

/// Non-symmetric Hausdorff extension of Kendall tau:
/// `max over sigma2 compatible with p2` of `min over sigma1 compatible with
/// p1` of the Kendall distance, evaluated in O(n^2) by pair counting.
/// Zero exactly when `p2` is stricter than `p1`.
pub fn hausdorff_ns(p1: &BucketRanking, p2: &BucketRanking) -> Result<f64> {
    let n = check_pair_args(p1, p2)?;
    Ok(ns_count(p1, p2) as f64 / (n * (n - 1) / 2) as f64)
}

/// Half-symmetric Hausdorff extension: the average of the two directed
/// values; symmetric and zero only on equal rankings.
pub fn hausdorff_half(p1: &BucketRanking, p2: &BucketRanking) -> Result<f64> {
    let n = check_pair_args(p1, p2)?;
    let doubled = ns_count(p1, p2) + ns_count(p2, p1);
    Ok(doubled as f64 / (n * (n - 1)) as f64)
}

/// Variant-dispatched Hausdorff distance.
pub fn hausdorff(
    variant: HausdorffVariant,
    p1: &BucketRanking,
    p2: &BucketRanking,
) -> Result<f64> {
    match variant {
        HausdorffVariant::Ns => hausdorff_ns(p1, p2),
        HausdorffVariant::Half => hausdorff_half(p1, p2),
    }
}

/// The three equivalent forms of the half-symmetric distance, each computed
/// independently: (set counting, per-pair indicator sums over mean bucket
/// ranks, profile-vector L1). All normalized to [0, 1].
pub fn hausdorff_half_expressions(
    p1: &BucketRanking,
    p2: &BucketRanking,
) -> Result<(f64, f64, f64)> {
    let n = check_pair_args(p1, p2)?;
    // Each form is accumulated as an exact integer on the half-unit scale and
    // divided once by the same denominator, so agreement is bitwise, not
    // approximate.
    let denom = (n * (n - 1)) as f64;

    let (a1, a2) = (p1.pair_order(), p2.pair_order());
    let mut opposite = 0usize;
    let mut tied1_strict2 = 0usize;
    let mut tied2_strict1 = 0usize;
    for (&s1, &s2) in a1.iter().zip(&a2) {
        if s1 != 0 && s2 != 0 && s1 != s2 {
            opposite += 1;
        } else if s1 == 0 && s2 != 0 {
            tied1_strict2 += 1;
        } else if s2 == 0 && s1 != 0 {
            tied2_strict1 += 1;
        }
    }
    let set_counting = (2 * opposite + tied1_strict2 + tied2_strict1) as f64 / denom;

    let mut indicator_doubled = 0usize;
    for i in 0..n {
        let (r1i, r2i) = (p1.mean_rank_doubled(i), p2.mean_rank_doubled(i));
        for j in i + 1..n {
            let d1 = r1i as i64 - p1.mean_rank_doubled(j) as i64;
            let d2 = r2i as i64 - p2.mean_rank_doubled(j) as i64;
            if d1 * d2 < 0 {
                indicator_doubled += 2;
            } else if (d1 == 0) != (d2 == 0) {
                indicator_doubled += 1;
            }
        }
    }
    let indicator_sum = indicator_doubled as f64 / denom;

    let profile_l1 = p1.profile().l1_half_units(&p2.profile()) as f64 / denom;

    Ok((set_counting, indicator_sum, profile_l1))
}

/// Literal max-min evaluation of the Hausdorff extensions over the two
/// compatible permutation sets. Exponential in the bucket sizes, so capped at
/// n <= 5; exists to validate the O(n^2) formulas.
pub fn hausdorff_oracle(
    p1: &BucketRanking,
    p2: &BucketRanking,
    variant: HausdorffVariant,
) -> Result<f64> {
    let n = check_pair_args(p1, p2)?;
    if n > 5 {
        return Err(Error::ItemCountOutOfRange {
            got: n,
            min: 2,
            max: 5,
        });
    }
    match variant {
        HausdorffVariant::Ns => oracle_ns(p1, p2),
        HausdorffVariant::Half => Ok((oracle_ns(p1, p2)? + oracle_ns(p2, p1)?) / 2.0),
    }
}

fn oracle_ns(p1: &BucketRanking, p2: &BucketRanking) -> Result<f64> {
    let set1 = p1.compatible_permutations()?;
    let set2 = p2.compatible_permutations()?;
    let mut worst: f64 = 0.0;
    for sigma2 in &set2 {
        let mut best = f64::INFINITY;
        for sigma1 in &set1 {
            best = best.min(Metric::KendallTau.distance(sigma1, sigma2)?);
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Number of bucket rankings of `n` items (ordered set partitions,
/// `sum over k of k! * S(n, k)`), by the recurrence over first-bucket sizes.
pub fn count_bucket_orders(n: usize) -> Result<u64> {
    if n == 0 || n > MAX_ITEMS {
        return Err(Error::ItemCountOutOfRange {
            got: n,
            min: 1,
            max: MAX_ITEMS,
        });
    }
    let mut counts = vec![0u64; n + 1];
    counts[0] = 1;
    for m in 1..=n {
        let mut total = 0u64;
        for first in 1..=m {
            total += binomial(m, first) * counts[m - first];
        }
        counts[m] = total;
    }
    Ok(counts[n])
}

fn binomial(n: usize, k: usize) -> u64 {
    (factorial(n) / (factorial(k) * factorial(n - k))) as u64
}

/// All bucket rankings of `n` items, by recursive choice of the leading
/// bucket. Deterministic order; sizes grow like the Fubini numbers, so
/// capped at n <= 6 (4683 rankings).
pub fn enumerate_bucket_orders(n: usize) -> Result<Vec<BucketRanking>> {
    if n == 0 || n > 6 {
        return Err(Error::ItemCountOutOfRange {
            got: n,
            min: 1,
            max: 6,
        });
    }
    let items: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(count_bucket_orders(n)? as usize);
    let mut prefix = Vec::new();
    fill_bucket_orders(n, &items, &mut prefix, &mut out)?;
    Ok(out)
}

fn fill_bucket_orders(
    n: usize,
    remaining: &[usize],
    prefix: &mut Vec<Vec<usize>>,
    out: &mut Vec<BucketRanking>,
) -> Result<()> {
    if remaining.is_empty() {
        out.push(BucketRanking::new(n, prefix.clone())?);
        return Ok(());
    }
    // Non-empty subsets of the remaining items, as bitmasks in ascending
    // order, keep the enumeration deterministic.
    for mask in 1u32..(1 << remaining.len()) {
        let first: Vec<usize> = remaining
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask & (1 << bit) != 0)
            .map(|(_, &item)| item)
            .collect();
        let rest: Vec<usize> = remaining
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask & (1 << bit) == 0)
            .map(|(_, &item)| item)
            .collect();
        prefix.push(first);
        fill_bucket_orders(n, &rest, prefix, out)?;
        prefix.pop();
    }
    Ok(())
}
