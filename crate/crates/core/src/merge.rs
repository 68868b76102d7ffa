use crate::bucket::BucketRanking;
use crate::dist::PairwiseMatrix;
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Additive slack for threshold comparisons. Decimal thresholds and matrix
/// entries rarely round to directly comparable floats (fl(0.51) - 0.5 sits
/// one ulp above fl(0.01)), so "within theta" is tested with this margin,
/// far below any meaningful probability difference.
pub const MERGE_TOL: f64 = 1e-12;

/// Strongest deviation from indifference among all item pairs inside the
/// span of buckets `i..=j` of `pi` (1-based bucket indices): the cost of
/// merging that whole span into one bucket. Singleton spans cost 0.
pub fn deviation_bar(
    mat: &PairwiseMatrix,
    pi: &BucketRanking,
    i: usize,
    j: usize,
) -> Result<f64> {
    if pi.n() != mat.n() {
        return Err(Error::SizeMismatch {
            expected: pi.n(),
            got: mat.n(),
        });
    }
    if i < 1 || i > j || j > pi.k() {
        return Err(Error::InvalidParameter(format!(
            "bucket span ({i}, {j}) out of range for {} buckets",
            pi.k()
        )));
    }
    let span: Vec<usize> = pi.buckets()[(i - 1)..j].concat();
    Ok(span_deviation(mat, &span))
}

fn span_deviation(mat: &PairwiseMatrix, span: &[usize]) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, &l) in span.iter().enumerate() {
        for &m in &span[(a + 1)..] {
            worst = worst.max(mat.deviation(l, m));
        }
    }
    worst
}

/// Repeatedly merges the most indifferent bucket span: among spans whose
/// deviation is within `theta` (up to [`MERGE_TOL`]), the one with the
/// smallest deviation wins (ties to the lexicographically smallest index
/// pair). Stops when no span is within `theta`. Output is monotone in
/// `theta`: raising the threshold only coarsens the result.
pub fn naive_merge(
    sigma_med: &Permutation,
    mat: &PairwiseMatrix,
    theta: f64,
) -> Result<BucketRanking> {
    merge_loop(sigma_med, mat, theta, |best: Option<f64>, dev| {
        best.map_or(true, |b| dev < b)
    })
}

/// Repeatedly merges the most different bucket span that is still within
/// `theta` up to [`MERGE_TOL`] (ties to the lexicographically smallest index
/// pair). Reaches coarsenings the smallest-first strategy cannot, at the
/// price of losing monotonicity in `theta`.
pub fn downward_merge(
    sigma_med: &Permutation,
    mat: &PairwiseMatrix,
    theta: f64,
) -> Result<BucketRanking> {
    merge_loop(sigma_med, mat, theta, |best: Option<f64>, dev| {
        best.map_or(true, |b| dev > b)
    })
}

fn merge_loop(
    sigma_med: &Permutation,
    mat: &PairwiseMatrix,
    theta: f64,
    prefer: impl Fn(Option<f64>, f64) -> bool,
) -> Result<BucketRanking> {
    if sigma_med.len() != mat.n() {
        return Err(Error::SizeMismatch {
            expected: sigma_med.len(),
            got: mat.n(),
        });
    }
    if !theta.is_finite() || !(0.0..=0.5).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "merge threshold must lie in [0, 0.5], got {theta}"
        )));
    }
    let mut buckets: Vec<Vec<usize>> = sigma_med
        .items_by_rank()
        .into_iter()
        .map(|item| vec![item])
        .collect();
    loop {
        let mut choice: Option<(usize, usize, f64)> = None;
        for i in 0..buckets.len() {
            for j in (i + 1)..buckets.len() {
                let span: Vec<usize> = buckets[i..=j].concat();
                let dev = span_deviation(mat, &span);
                if dev <= theta + MERGE_TOL && prefer(choice.map(|(_, _, d)| d), dev) {
                    choice = Some((i, j, dev));
                }
            }
        }
        let Some((i, j, _)) = choice else {
            break;
        };
        let mut merged: Vec<usize> = buckets[i..=j].concat();
        merged.sort_unstable();
        buckets.splice(i..=j, std::iter::once(merged));
    }
    BucketRanking::new(sigma_med.len(), buckets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{plackett_luce_random, RankingDistribution};

    /// Four items with one nearly tied adjacent pair (C, D), one mildly
    /// tied pair (B, C), and everything else clearly separated.
    fn example_matrix() -> PairwiseMatrix {
        PairwiseMatrix::from_upper_triangle(
            4,
            &[
                ((0, 1), 0.65),
                ((0, 2), 0.8),
                ((0, 3), 0.85),
                ((1, 2), 0.52),
                ((1, 3), 0.7),
                ((2, 3), 0.51),
            ],
        )
        .unwrap()
    }

    fn identity(n: usize) -> Permutation {
        Permutation::identity(n).unwrap()
    }

    fn buckets(pi: &BucketRanking) -> Vec<Vec<usize>> {
        pi.buckets().to_vec()
    }

    #[test]
    fn deviation_bar_examples() {
        let mat = example_matrix();
        let singletons = BucketRanking::from_permutation(&identity(4));
        assert_eq!(deviation_bar(&mat, &singletons, 2, 2).unwrap(), 0.0);
        assert!((deviation_bar(&mat, &singletons, 2, 4).unwrap() - 0.2).abs() < 1e-15);
        assert!((deviation_bar(&mat, &singletons, 3, 4).unwrap() - 0.01).abs() < 1e-15);
        assert!(deviation_bar(&mat, &singletons, 0, 2).is_err());
        assert!(deviation_bar(&mat, &singletons, 3, 5).is_err());
        assert!(deviation_bar(&mat, &singletons, 3, 2).is_err());

        let uniform = RankingDistribution::uniform(4).unwrap().pairwise_matrix();
        assert_eq!(deviation_bar(&uniform, &singletons, 1, 4).unwrap(), 0.0);
    }

    #[test]
    fn threshold_endpoints() {
        let mat = example_matrix();
        let median = identity(4);
        for merge in [naive_merge, downward_merge] {
            let fine = merge(&median, &mat, 0.0).unwrap();
            assert_eq!(fine, BucketRanking::from_permutation(&median));
            let coarse = merge(&median, &mat, 0.5).unwrap();
            assert_eq!(coarse, BucketRanking::single_bucket(4).unwrap());
        }
        assert!(naive_merge(&median, &mat, 0.6).is_err());
        assert!(naive_merge(&median, &mat, -0.1).is_err());
    }

    #[test]
    fn smallest_first_merging_on_the_example_matrix() {
        let mat = example_matrix();
        let median = identity(4);
        let expected: [(f64, Vec<Vec<usize>>); 4] = [
            (0.01, vec![vec![0], vec![1], vec![2, 3]]),
            (0.02, vec![vec![0], vec![1], vec![2, 3]]),
            (0.19, vec![vec![0, 1], vec![2, 3]]),
            (0.2, vec![vec![0, 1], vec![2, 3]]),
        ];
        for (theta, want) in expected {
            let got = naive_merge(&median, &mat, theta).unwrap();
            assert_eq!(buckets(&got), want, "theta {theta}");
        }
    }

    #[test]
    fn largest_first_merging_reaches_four_distinct_coarsenings() {
        let mat = example_matrix();
        let median = identity(4);
        let expected: [(f64, Vec<Vec<usize>>); 4] = [
            (0.01, vec![vec![0], vec![1], vec![2, 3]]),
            (0.02, vec![vec![0], vec![1, 2], vec![3]]),
            (0.19, vec![vec![0, 1], vec![2, 3]]),
            (0.2, vec![vec![0], vec![1, 2, 3]]),
        ];
        let mut outputs = Vec::new();
        for (theta, want) in expected {
            let got = downward_merge(&median, &mat, theta).unwrap();
            assert_eq!(buckets(&got), want, "theta {theta}");
            outputs.push(got);
        }
        for a in 0..outputs.len() {
            for b in (a + 1)..outputs.len() {
                assert_ne!(outputs[a], outputs[b]);
            }
        }
    }

    #[test]
    fn largest_first_is_not_monotone_but_smallest_first_is() {
        let mat = example_matrix();
        let median = identity(4);
        let thetas = [0.0, 0.01, 0.02, 0.19, 0.2, 0.35, 0.5];

        let naive: Vec<BucketRanking> = thetas
            .iter()
            .map(|&t| naive_merge(&median, &mat, t).unwrap())
            .collect();
        for w in naive.windows(2) {
            assert!(w[0].is_stricter(&w[1]).unwrap());
        }

        let down_002 = downward_merge(&median, &mat, 0.02).unwrap();
        let down_019 = downward_merge(&median, &mat, 0.19).unwrap();
        assert!(!down_002.is_stricter(&down_019).unwrap());
    }

    #[test]
    fn smallest_first_output_buckets_stay_within_threshold() {
        for seed in 0..10 {
            let mat = plackett_luce_random(5, seed).unwrap().pairwise_matrix();
            let median = identity(5);
            for theta in [0.0, 0.05, 0.1, 0.25, 0.4, 0.5] {
                let out = naive_merge(&median, &mat, theta).unwrap();
                for b in 1..=out.k() {
                    let dev = deviation_bar(&mat, &out, b, b).unwrap();
                    assert!(
                        dev <= theta + MERGE_TOL,
                        "seed {seed}, theta {theta}, bucket {b}: deviation {dev}"
                    );
                }
            }
        }
    }

    #[test]
    fn smallest_first_is_monotone_on_random_matrices() {
        let thetas: Vec<f64> = (0..=10).map(|k| k as f64 / 20.0).collect();
        for seed in 0..10 {
            let mat = plackett_luce_random(5, seed).unwrap().pairwise_matrix();
            let median = identity(5);
            let outputs: Vec<BucketRanking> = thetas
                .iter()
                .map(|&t| naive_merge(&median, &mat, t).unwrap())
                .collect();
            for w in outputs.windows(2) {
                assert!(w[0].is_stricter(&w[1]).unwrap(), "seed {seed}");
            }
        }
    }

    #[test]
    fn merges_never_reorder_the_median() {
        for seed in 0..10 {
            let p = plackett_luce_random(4, seed).unwrap();
            let mat = p.pairwise_matrix();
            let median = crate::median::metric_median(&p, crate::metric::Metric::KendallTau).median;
            for theta in [0.05, 0.2, 0.45] {
                for merge in [naive_merge, downward_merge] {
                    let out = merge(&median, &mat, theta).unwrap();
                    for i in 0..4 {
                        for j in 0..4 {
                            if out.bucket_of(i) < out.bucket_of(j) {
                                assert!(median.rank_of(i) < median.rank_of(j));
                            }
                        }
                    }
                }
            }
        }
    }
}
