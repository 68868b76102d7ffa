use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bucket::BucketRanking;
use crate::dist::RankingDistribution;
use crate::error::{Error, Result};
use crate::median::{borda, metric_median};
use crate::merge::{downward_merge, naive_merge};
use crate::metric::Metric;

/// A distribution-to-bucket-ranking statistic: the targets of breakdown
/// analysis. The merge variants plug into the Kemeny median.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statistic {
    Kemeny,
    Borda,
    Constant,
    NaiveMerge { theta: f64 },
    DownwardMerge { theta: f64 },
}

impl Statistic {
    pub fn apply(&self, p: &RankingDistribution) -> Result<BucketRanking> {
        match self {
            Statistic::Kemeny => Ok(BucketRanking::from_permutation(
                &metric_median(p, Metric::KendallTau).median,
            )),
            Statistic::Borda => Ok(BucketRanking::from_permutation(&borda(p))),
            Statistic::Constant => BucketRanking::single_bucket(p.n()),
            Statistic::NaiveMerge { theta } => {
                let median = metric_median(p, Metric::KendallTau).median;
                naive_merge(&median, &p.pairwise_matrix(), *theta)
            }
            Statistic::DownwardMerge { theta } => {
                let median = metric_median(p, Metric::KendallTau).median;
                downward_merge(&median, &p.pairwise_matrix(), *theta)
            }
        }
    }

    /// Stable text form, also accepted by the parser.
    pub fn label(&self) -> String {
        match self {
            Statistic::Kemeny => "kemeny".into(),
            Statistic::Borda => "borda".into(),
            Statistic::Constant => "constant".into(),
            Statistic::NaiveMerge { theta } => format!("naive_merge:{theta}"),
            Statistic::DownwardMerge { theta } => format!("downward_merge:{theta}"),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, theta) = match s.split_once(':') {
            Some((name, raw)) => {
                let theta: f64 = raw.parse().map_err(|_| {
                    Error::InvalidParameter(format!("bad merge threshold in statistic '{s}'"))
                })?;
                if !theta.is_finite() || !(0.0..=0.5).contains(&theta) {
                    return Err(Error::InvalidParameter(format!(
                        "merge threshold must lie in [0, 0.5], got {theta}"
                    )));
                }
                (name, Some(theta))
            }
            None => (s, None),
        };
        match (name, theta) {
            ("kemeny", None) => Ok(Statistic::Kemeny),
            ("borda", None) => Ok(Statistic::Borda),
            ("constant", None) => Ok(Statistic::Constant),
            ("naive_merge", Some(theta)) => Ok(Statistic::NaiveMerge { theta }),
            ("downward_merge", Some(theta)) => Ok(Statistic::DownwardMerge { theta }),
            _ => Err(Error::InvalidParameter(format!(
                "unknown statistic '{s}'; expected kemeny, borda, constant, \
                 naive_merge:<theta>, or downward_merge:<theta>"
            ))),
        }
    }
}
