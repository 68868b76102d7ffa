use serde::Serialize;

use crate::bucket::BucketRanking;
use crate::dist::{PairwiseMatrix, RankingDistribution};
use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::perm::{enumerate, PermIndex, Permutation};

/// Tolerance for collecting ties into the argmin set.
const TIE_TOL: f64 = 1e-12;

/// Outcome of an exact median computation: the tie-broken minimizer, its
/// objective value, and every permutation attaining that value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MedianResult {
    pub median: Permutation,
    pub objective: f64,
    pub argmin_set: Vec<PermIndex>,
}

/// The exact metric median: the permutation minimizing the expected distance
/// to a draw from `p`, by brute force over all n! candidates. Ties go to the
/// smallest permutation index; the full argmin set is reported alongside.
pub fn metric_median(p: &RankingDistribution, metric: Metric) -> MedianResult {
    let n = p.n();
    let perms = enumerate(n).expect("distribution n is validated");
    if n == 1 {
        return MedianResult {
            median: perms.into_iter().next().unwrap(),
            objective: 0.0,
            argmin_set: vec![PermIndex(0)],
        };
    }
    let objectives = match metric {
        Metric::KendallTau => kendall_objectives(p, &perms),
        Metric::SpearmanRho | Metric::SpearmanFootrule => rank_objectives(p, &perms, metric),
    };
    let min = objectives.iter().copied().fold(f64::INFINITY, f64::min);
    let argmin_set: Vec<PermIndex> = objectives
        .iter()
        .enumerate()
        .filter(|(_, &u)| u <= min + TIE_TOL)
        .map(|(i, _)| PermIndex(i))
        .collect();
    MedianResult {
        median: perms[argmin_set[0].0].clone(),
        objective: min,
        argmin_set,
    }
}

/// Expected Kendall distance of every candidate, via the pairwise matrix:
/// a candidate pays `1 - P[i][j]` for each pair it orders i before j.
fn kendall_objectives(p: &RankingDistribution, perms: &[Permutation]) -> Vec<f64> {
    let n = p.n();
    let mat = p.pairwise_matrix();
    let denom = Metric::KendallTau.max_count(n) as f64;
    perms
        .iter()
        .map(|sigma| {
            let mut total = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    total += if sigma.rank_of(i) < sigma.rank_of(j) {
                        1.0 - mat.get(i, j)
                    } else {
                        mat.get(i, j)
                    };
                }
            }
            total / denom
        })
        .collect()
}

/// Expected rho or footrule distance of every candidate, via rank marginals:
/// both metrics decompose into per-item costs of placing item i at rank s.
fn rank_objectives(p: &RankingDistribution, perms: &[Permutation], metric: Metric) -> Vec<f64> {
    let n = p.n();
    let mut marginals = vec![0.0; n * n];
    for (sigma, &prob) in perms.iter().zip(p.probs()) {
        if prob == 0.0 {
            continue;
        }
        for i in 0..n {
            marginals[i * n + (sigma.rank_of(i) - 1)] += prob;
        }
    }
    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        for s in 1..=n {
            cost[i * n + (s - 1)] = (1..=n)
                .map(|r| {
                    let diff = r.abs_diff(s) as f64;
                    let weight = match metric {
                        Metric::SpearmanRho => diff * diff,
                        Metric::SpearmanFootrule => diff,
                        Metric::KendallTau => unreachable!("handled separately"),
                    };
                    marginals[i * n + (r - 1)] * weight
                })
                .sum();
        }
    }
    let denom = metric.max_count(n) as f64;
    perms
        .iter()
        .map(|sigma| {
            (0..n)
                .map(|i| cost[i * n + (sigma.rank_of(i) - 1)])
                .sum::<f64>()
                / denom
        })
        .collect()
}

/// O(n²) Kemeny median for strictly stochastically transitive matrices: item
/// i is ranked one place below the number of items that beat it.
pub fn kemeny_median_sst(mat: &PairwiseMatrix) -> Result<Permutation> {
    if !mat.is_sst(true) {
        return Err(Error::NotStrictlySst);
    }
    let n = mat.n();
    let ranks = (0..n)
        .map(|i| 1 + (0..n).filter(|&k| k != i && mat.get(i, k) < 0.5).count())
        .collect();
    Permutation::from_ranks(ranks)
}

/// The Borda ranking: items sorted ascending by mean rank under `p`, ties
/// broken by item id.
pub fn borda(p: &RankingDistribution) -> Permutation {
    let n = p.n();
    // Accumulate per-(item, rank) marginals before weighting by rank, so that
    // items with identical rank marginals get bitwise-identical means and the
    // id tie-break actually fires (summing prob * rank directly would order
    // the addends differently per item).
    let mut marginals = vec![0.0; n * n];
    for (sigma, &prob) in enumerate(n)
        .expect("distribution n is validated")
        .iter()
        .zip(p.probs())
    {
        if prob == 0.0 {
            continue;
        }
        for i in 0..n {
            marginals[i * n + (sigma.rank_of(i) - 1)] += prob;
        }
    }
    let mut mean_ranks = vec![0.0; n];
    for i in 0..n {
        for r in 0..n {
            mean_ranks[i] += (r + 1) as f64 * marginals[i * n + r];
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| mean_ranks[a].total_cmp(&mean_ranks[b]).then(a.cmp(&b)));
    let mut ranks = vec![0; n];
    for (pos, &item) in order.iter().enumerate() {
        ranks[item] = pos + 1;
    }
    Permutation::from_ranks(ranks).expect("positions form a bijection")
}

/// Expected averaged Hausdorff distance between a statistic's output and a
/// draw from `p` (each draw viewed as an all-singletons bucket ranking).
/// Lands in [0, 1]; lower is better.
pub fn loss(t_output: &BucketRanking, p: &RankingDistribution) -> Result<f64> {
    if t_output.n() != p.n() {
        return Err(Error::SizeMismatch {
            expected: t_output.n(),
            got: p.n(),
        });
    }
    let mut total = 0.0;
    for (sigma, &prob) in enumerate(p.n())?.iter().zip(p.probs()) {
        if prob == 0.0 {
            continue;
        }
        total += prob * crate::bucket::hausdorff_half(t_output, &BucketRanking::from_permutation(sigma))?;
    }
    Ok(total)
}

/// How well the statistic locates the distribution, on the same [0, 1]
/// scale as the loss (the metric's diameter is 1 under our normalization).
pub fn accuracy_of_location(t_output: &BucketRanking, p: &RankingDistribution) -> Result<f64> {
    Ok(1.0 - loss(t_output, p)?)
}
