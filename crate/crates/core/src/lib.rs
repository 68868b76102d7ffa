//! Robust consensus ranking: exact medians over small item sets, breakdown
//! bounds describing how much probability mass an adversary must move to
//! displace a median, an empirical saddle-point attack that searches for
//! such displacements, and merge-based bucket-ranking statistics that trade
//! a little resolution for a lot of robustness.
//!
//! Everything enumerates the full permutation group, so item counts are
//! capped at 8 (and lower for the cubic-cost bounds). Within that scale all
//! medians, bounds, and distances are exact; the attack is the only
//! stochastic component and is fully deterministic given its seed.
//!
//! The main entry points:
//!
//! - [`perm::Permutation`] and [`bucket::BucketRanking`]: strict and tied
//!   rankings, with [`metric::Metric`] distances on the former and the
//!   Hausdorff extensions ([`bucket::hausdorff_ns`], [`bucket::hausdorff_half`])
//!   on the latter.
//! - [`dist::RankingDistribution`]: dense distributions over rankings, with
//!   Plackett-Luce constructors and pairwise preference matrices.
//! - [`median::metric_median`], [`median::kemeny_median_sst`],
//!   [`median::borda`]: location statistics; [`median::loss`] scores any
//!   bucket-ranking output against a distribution.
//! - [`bounds::epsilon_plus`] / [`bounds::epsilon_minus`]: exact upper and
//!   lower breakdown bounds, rational arithmetic inside.
//! - [`attack::estimate_breakdown`]: the smoothed Lagrangian attack on any
//!   [`statistic::Statistic`].
//! - [`merge::naive_merge`] / [`merge::downward_merge`]: robustifying
//!   coarsenings of a median driven by pairwise near-ties.

pub mod attack;
pub mod bounds;
pub mod bucket;
pub mod dist;
pub mod error;
pub mod median;
pub mod merge;
pub mod metric;
pub mod perm;
pub mod statistic;

pub use attack::{estimate_breakdown, AttackConfig, AttackResult, TraceStep};
pub use bounds::{
    breakdown_curve_bounds, epsilon_minus, epsilon_plus, reverse_attack,
    reverse_attack_moves_median, BoundResult, BreakdownValue,
};
pub use bucket::{
    hausdorff, hausdorff_half, hausdorff_ns, BucketRanking, HausdorffVariant,
};
pub use dist::{
    make_named, plackett_luce, plackett_luce_random, total_variation, NamedFamily,
    PairwiseMatrix, RankingDistribution,
};
pub use error::{Error, Result};
pub use median::{
    accuracy_of_location, borda, kemeny_median_sst, loss, metric_median, MedianResult,
};
pub use merge::{deviation_bar, downward_merge, naive_merge, MERGE_TOL};
pub use metric::Metric;
pub use perm::{PermIndex, Permutation, MAX_ITEMS};
pub use statistic::Statistic;
