use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{enumerate, factorial, PermIndex, Permutation, MAX_ITEMS};

const PROB_SUM_TOL: f64 = 1e-12;

/// A probability distribution over all rankings of `n` items, stored densely
/// and indexed by [`PermIndex`]. Limited to n <= 8 (8! = 40320 entries).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct RankingDistribution {
    n: usize,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl RankingDistribution {
    /// Validates and wraps a dense probability vector of length `n!`.
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_ITEMS {
            return Err(Error::ItemCountOutOfRange {
                got: n,
                min: 1,
                max: MAX_ITEMS,
            });
        }
        if probs.len() != factorial(n) {
            return Err(Error::InvalidDistribution(format!(
                "expected {} probabilities for n = {n}, got {}",
                factorial(n),
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::InvalidDistribution(
                "probabilities must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(Self { n, probs })
    }

    /// The uniform distribution over all rankings.
    pub fn uniform(n: usize) -> Result<Self> {
        let total = factorial(n);
        Self::new(n, vec![1.0 / total as f64; total])
    }

    /// All mass on one ranking.
    pub fn point_mass(sigma: &Permutation) -> Self {
        let mut probs = vec![0.0; factorial(sigma.len())];
        probs[sigma.index().0] = 1.0;
        Self {
            n: sigma.len(),
            probs,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: PermIndex) -> f64 {
        self.probs[index.0]
    }

    /// The pairwise preference matrix: entry (i, j) is the probability that
    /// item i is ranked before item j; the diagonal is 0.5 by convention.
    pub fn pairwise_matrix(&self) -> PairwiseMatrix {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for (idx, sigma) in enumerate(n).expect("n validated").iter().enumerate() {
            let p = self.probs[idx];
            if p == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    if i != j && sigma.rank_of(i) < sigma.rank_of(j) {
                        entries[i * n + j] += p;
                    }
                }
            }
        }
        for i in 0..n {
            entries[i * n + i] = 0.5;
        }
        PairwiseMatrix { n, entries }
    }
}

impl TryFrom<RawDistribution> for RankingDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        Self::new(raw.n, raw.probs)
    }
}

impl From<RankingDistribution> for RawDistribution {
    fn from(d: RankingDistribution) -> Self {
        RawDistribution {
            n: d.n,
            probs: d.probs,
        }
    }
}

/// Total variation distance `1/2 sum |p - q|` between two distributions on
/// the same item count; always in [0, 1].
pub fn total_variation(p: &RankingDistribution, q: &RankingDistribution) -> Result<f64> {
    if p.n != q.n {
        return Err(Error::SizeMismatch {
            expected: p.n,
            got: q.n,
        });
    }
    Ok(p.probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / 2.0)
}

/// The exact Plackett-Luce distribution for positive item weights: rankings
/// are built top-down, each rank going to item `i` with probability
/// proportional to `w_i` among the items still unplaced.
pub fn plackett_luce(weights: &[f64]) -> Result<RankingDistribution> {
    let n = weights.len();
    if n == 0 || n > MAX_ITEMS {
        return Err(Error::ItemCountOutOfRange {
            got: n,
            min: 1,
            max: MAX_ITEMS,
        });
    }
    if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
        return Err(Error::InvalidParameter(
            "Plackett-Luce weights must be positive and finite".into(),
        ));
    }
    let mut probs = Vec::with_capacity(factorial(n));
    for sigma in enumerate(n)? {
        let items = sigma.items_by_rank();
        // Suffix sums over the not-yet-placed weights, walked best-first.
        let mut remaining: f64 = weights.iter().sum();
        let mut p = 1.0;
        for &item in &items {
            p *= weights[item] / remaining;
            remaining -= weights[item];
        }
        probs.push(p);
    }
    normalize(&mut probs);
    RankingDistribution::new(n, probs)
}

/// Plackett-Luce with weights `exp(logit)`, logits drawn independently from
/// the standard normal under a seeded generator.
pub fn plackett_luce_random(n: usize, seed: u64) -> Result<RankingDistribution> {
    if n == 0 || n > MAX_ITEMS {
        return Err(Error::ItemCountOutOfRange {
            got: n,
            min: 1,
            max: MAX_ITEMS,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..n)
        .map(|_| {
            let logit: f64 = StandardNormal.sample(&mut rng);
            logit.exp()
        })
        .collect();
    plackett_luce(&weights)
}

/// Scrubs accumulated rounding so the vector passes the sum-to-one check.
fn normalize(probs: &mut [f64]) {
    let sum: f64 = probs.iter().sum();
    for p in probs {
        *p /= sum;
    }
}

/// Hand-crafted distribution families used throughout the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NamedFamily {
    /// Exactly the uniform distribution.
    #[serde(rename = "uniform-ish")]
    UniformIsh,
    /// Mostly one ranking: `(1 - eta) * uniform + eta * pointmass(sigma0)`.
    #[serde(rename = "pointmass-ish")]
    PointmassIsh,
    /// Mostly two adjacent rankings with a probability gap between them:
    /// `(1 - eta) * uniform + eta * ((1 + gap)/2 on sigma0, (1 - gap)/2 on
    /// sigma0 with its top two items swapped)`.
    #[serde(rename = "bucket-ish")]
    BucketIsh,
}

/// Builds one of the named families around `sigma0` with mixing weight `eta`
/// and (for the two-ranking family) probability `gap`.
pub fn make_named(
    kind: NamedFamily,
    sigma0: &Permutation,
    eta: f64,
    gap: f64,
) -> Result<RankingDistribution> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!(
            "eta must lie in [0, 1], got {eta}"
        )));
    }
    if !(0.0..=1.0).contains(&gap) {
        return Err(Error::InvalidParameter(format!(
            "gap must lie in [0, 1], got {gap}"
        )));
    }
    let n = sigma0.len();
    let total = factorial(n);
    let base = (1.0 - eta) / total as f64;
    let mut probs = vec![base; total];
    match kind {
        NamedFamily::UniformIsh => {
            return RankingDistribution::uniform(n);
        }
        NamedFamily::PointmassIsh => {
            probs[sigma0.index().0] += eta;
        }
        NamedFamily::BucketIsh => {
            if n < 2 {
                return Err(Error::InvalidParameter(
                    "the two-ranking family needs at least two items to swap".into(),
                ));
            }
            let neighbor = sigma0.swap_ranks(1, 2)?;
            probs[sigma0.index().0] += eta * (0.5 + gap / 2.0);
            probs[neighbor.index().0] += eta * (0.5 - gap / 2.0);
        }
    }
    RankingDistribution::new(n, probs)
}

/// Matrix of pairwise preference probabilities. Entry (i, j) is P(i ranked
/// before j); rows and columns are complementary and the diagonal is 0.5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct PairwiseMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl PairwiseMatrix {
    /// Validates a row-major matrix: square, entries in [0, 1], diagonal
    /// 0.5, and `P[i][j] + P[j][i] = 1` within 1e-12.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_ITEMS {
            return Err(Error::ItemCountOutOfRange {
                got: n,
                min: 1,
                max: MAX_ITEMS,
            });
        }
        if entries.len() != n * n {
            return Err(Error::InvalidPairwiseMatrix(format!(
                "expected {}x{n} entries, got {}",
                n,
                entries.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let v = entries[i * n + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidPairwiseMatrix(format!(
                        "entry ({i}, {j}) = {v} outside [0, 1]"
                    )));
                }
                if i == j && v != 0.5 {
                    return Err(Error::InvalidPairwiseMatrix(format!(
                        "diagonal entry ({i}, {i}) must be 0.5, got {v}"
                    )));
                }
                if i < j {
                    let w = entries[j * n + i];
                    if (v + w - 1.0).abs() > 1e-12 {
                        return Err(Error::InvalidPairwiseMatrix(format!(
                            "entries ({i}, {j}) and ({j}, {i}) sum to {}, not 1",
                            v + w
                        )));
                    }
                }
            }
        }
        Ok(Self { n, entries })
    }

    /// Builds the matrix from its strict upper triangle; the lower triangle
    /// and diagonal are filled in by the complement convention.
    pub fn from_upper_triangle(n: usize, upper: &[((usize, usize), f64)]) -> Result<Self> {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 0.5;
        }
        for &((i, j), v) in upper {
            if i >= j || j >= n {
                return Err(Error::InvalidPairwiseMatrix(format!(
                    "({i}, {j}) is not an upper-triangle pair"
                )));
            }
            entries[i * n + j] = v;
            entries[j * n + i] = 1.0 - v;
        }
        Self::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// P(item i ranked before item j).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Distance of the pair from indifference: `|P[i][j] - 1/2|`.
    pub fn deviation(&self, i: usize, j: usize) -> f64 {
        (self.get(i, j) - 0.5).abs()
    }

    /// Stochastic transitivity: whenever i weakly beats j and j weakly beats
    /// k, i weakly beats k. The strict version additionally forbids any
    /// off-diagonal tie at exactly 1/2 (so the beats relation is a strict
    /// total order).
    pub fn is_sst(&self, strict: bool) -> bool {
        let n = self.n;
        if strict {
            for i in 0..n {
                for j in 0..n {
                    if i != j && self.get(i, j) == 0.5 {
                        return false;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    if self.get(i, j) >= 0.5 && self.get(j, k) >= 0.5 && self.get(i, k) < 0.5
                    {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl TryFrom<Vec<Vec<f64>>> for PairwiseMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidPairwiseMatrix(
                "matrix rows must all have length n".into(),
            ));
        }
        Self::new(n, rows.into_iter().flatten().collect())
    }
}

impl From<PairwiseMatrix> for Vec<Vec<f64>> {
    fn from(m: PairwiseMatrix) -> Self {
        m.entries.chunks(m.n).map(|row| row.to_vec()).collect()
    }
}
