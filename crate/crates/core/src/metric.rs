use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Rank distances between total rankings, each normalized into `[0, 1]` by
/// its maximum over permutation pairs. All three satisfy
/// `d(nu, reverse(sigma)) = 1 - d(nu, sigma)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Fraction of discordant item pairs.
    KendallTau,
    /// Sum of squared rank differences over `n (n^2 - 1) / 3`.
    SpearmanRho,
    /// Sum of absolute rank differences over `floor(n^2 / 2)`.
    SpearmanFootrule,
}

impl Metric {
    pub const ALL: [Metric; 3] = [
        Metric::KendallTau,
        Metric::SpearmanRho,
        Metric::SpearmanFootrule,
    ];

    /// Unnormalized integer distance.
    pub fn count(&self, a: &Permutation, b: &Permutation) -> Result<usize> {
        if a.len() != b.len() {
            return Err(Error::SizeMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        let (ra, rb) = (a.ranks(), b.ranks());
        let n = ra.len();
        Ok(match self {
            Metric::KendallTau => {
                let mut discordant = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        let da = ra[i] < ra[j];
                        let db = rb[i] < rb[j];
                        if da != db {
                            discordant += 1;
                        }
                    }
                }
                discordant
            }
            Metric::SpearmanRho => (0..n)
                .map(|i| {
                    let d = ra[i].abs_diff(rb[i]);
                    d * d
                })
                .sum(),
            Metric::SpearmanFootrule => (0..n).map(|i| ra[i].abs_diff(rb[i])).sum(),
        })
    }

    /// Maximum of [`Metric::count`] over all pairs of rankings of `n` items,
    /// attained at a ranking and its reverse.
    pub fn max_count(&self, n: usize) -> usize {
        match self {
            Metric::KendallTau => n * (n - 1) / 2,
            Metric::SpearmanRho => n * (n * n - 1) / 3,
            Metric::SpearmanFootrule => n * n / 2,
        }
    }

    /// Normalized distance in `[0, 1]`. Defined for n >= 2 (a single item
    /// admits only one ranking, so there is nothing to normalize by).
    pub fn distance(&self, a: &Permutation, b: &Permutation) -> Result<f64> {
        if a.len() < 2 {
            return Err(Error::ItemCountOutOfRange {
                got: a.len(),
                min: 2,
                max: crate::perm::MAX_ITEMS,
            });
        }
        let count = self.count(a, b)?;
        Ok(count as f64 / self.max_count(a.len()) as f64)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Metric::KendallTau => "kendall_tau",
            Metric::SpearmanRho => "spearman_rho",
            Metric::SpearmanFootrule => "spearman_footrule",
        };
        f.write_str(name)
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kendall" | "kendall_tau" => Ok(Metric::KendallTau),
            "rho" | "spearman_rho" => Ok(Metric::SpearmanRho),
            "footrule" | "spearman_footrule" => Ok(Metric::SpearmanFootrule),
            other => Err(Error::InvalidParameter(format!(
                "unknown metric {other:?} (expected kendall_tau, spearman_rho, or spearman_footrule)"
            ))),
        }
    }
}

/// Normalized Kendall tau distance: discordant pairs / C(n, 2).
pub fn kendall_tau(a: &Permutation, b: &Permutation) -> Result<f64> {
    Metric::KendallTau.distance(a, b)
}

/// Normalized Spearman rho distance: squared rank displacement over its max.
pub fn spearman_rho(a: &Permutation, b: &Permutation) -> Result<f64> {
    Metric::SpearmanRho.distance(a, b)
}

/// Normalized Spearman footrule distance: absolute rank displacement over
/// its max.
pub fn spearman_footrule(a: &Permutation, b: &Permutation) -> Result<f64> {
    Metric::SpearmanFootrule.distance(a, b)
}
