use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::dist::RankingDistribution;
use crate::error::{Error, Result};
use crate::median::metric_median;
use crate::metric::Metric;
use crate::perm::{enumerate, Permutation};

/// A breakdown budget, or the verdict that no budget of mass movement can
/// push the median past the requested deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BreakdownValue {
    Value(f64),
    Unbreakable,
}

impl BreakdownValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            BreakdownValue::Value(v) => Some(*v),
            BreakdownValue::Unbreakable => None,
        }
    }

    pub fn is_unbreakable(&self) -> bool {
        matches!(self, BreakdownValue::Unbreakable)
    }
}

impl fmt::Display for BreakdownValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BreakdownValue::Value(v) => write!(f, "{v}"),
            BreakdownValue::Unbreakable => write!(f, "unbreakable"),
        }
    }
}

impl Serialize for BreakdownValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BreakdownValue::Value(v) => serializer.serialize_f64(*v),
            BreakdownValue::Unbreakable => serializer.serialize_str("unbreakable"),
        }
    }
}

/// Output of a breakdown bound computation.
#[derive(Debug, Clone, Serialize)]
pub struct BoundResult {
    /// The bound itself, on the scale where a budget of eps lets an
    /// adversary move eps/2 of probability mass (total variation eps/2).
    pub value: BreakdownValue,
    /// Whether the bound certifies an actual attack. For the upper bound
    /// this is the mass condition `eps <= 2 p(median)`; the lower bound is
    /// unconditional.
    pub condition_ok: bool,
    /// The certifying attack distribution, when one exists.
    pub witness: Option<RankingDistribution>,
    /// The far ranking the bound's outer minimization settled on.
    pub target: Option<Permutation>,
}

impl BoundResult {
    fn unbreakable() -> Self {
        BoundResult {
            value: BreakdownValue::Unbreakable,
            condition_ok: false,
            witness: None,
            target: None,
        }
    }
}

/// Exact rational view of a distribution: every f64 probability is a dyadic
/// rational, so all downstream comparisons are free of rounding.
struct Engine {
    perms: Vec<Permutation>,
    probs: Vec<BigRational>,
}

impl Engine {
    fn new(p: &RankingDistribution) -> Self {
        Engine {
            perms: enumerate(p.n()).expect("distribution n is validated"),
            probs: p.probs().iter().map(|&x| rational_from(x)).collect(),
        }
    }

    /// Unnormalized pairwise distance counts c[a][b] for all permutations.
    fn count_matrix(&self, metric: Metric) -> Vec<Vec<usize>> {
        self.perms
            .iter()
            .map(|a| {
                self.perms
                    .iter()
                    .map(|b| metric.count(a, b).expect("same n by construction"))
                    .collect()
            })
            .collect()
    }

    /// Expected distance count of every candidate under the distribution.
    fn expected_counts(&self, counts: &[Vec<usize>]) -> Vec<BigRational> {
        let total = self.perms.len();
        (0..total)
            .map(|s| {
                let mut acc = BigRational::zero();
                for v in 0..total {
                    if self.probs[v].is_zero() {
                        continue;
                    }
                    acc += &self.probs[v] * BigRational::from_integer(BigInt::from(counts[v][s]));
                }
                acc
            })
            .collect()
    }
}

fn rational_from(x: f64) -> BigRational {
    BigRational::from_float(x).expect("probabilities and thresholds are finite")
}

fn argmin(values: &[BigRational]) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] < values[best] {
            best = i;
        }
    }
    best
}

fn check_delta(delta: f64) -> Result<()> {
    if !delta.is_finite() || !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "deviation threshold must lie in [0, 1], got {delta}"
        )));
    }
    Ok(())
}

fn check_items(n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(Error::ItemCountOutOfRange { got: n, min: 1, max });
    }
    Ok(())
}

/// Membership of every permutation in the far set: distance count from the
/// median at least `delta` times the metric's maximum count.
fn far_set(
    counts_from_star: impl Iterator<Item = usize>,
    delta: &BigRational,
    max_count: usize,
) -> Vec<bool> {
    let threshold = delta * BigRational::from_integer(BigInt::from(max_count));
    counts_from_star
        .map(|c| BigRational::from_integer(BigInt::from(c)) >= threshold)
        .collect()
}

fn trivial_result(p: &RankingDistribution, star: Permutation, with_witness: bool) -> BoundResult {
    BoundResult {
        value: BreakdownValue::Value(0.0),
        condition_ok: true,
        witness: with_witness.then(|| p.clone()),
        target: Some(star),
    }
}

/// Upper bound on the Kemeny breakdown budget at deviation `delta`: the
/// cheapest guaranteed way to push the median at least `delta` away, over
/// all far targets, paying the worst case over near competitors. Exact
/// rational evaluation; `condition_ok` reports whether the certifying
/// reverse attack fits inside twice the median's own mass, and when it does
/// the witness attack distribution is attached.
pub fn epsilon_plus(p: &RankingDistribution, delta: f64) -> Result<BoundResult> {
    check_delta(delta)?;
    check_items(p.n(), 6)?;
    let n = p.n();
    let engine = Engine::new(p);
    let counts = engine.count_matrix(Metric::KendallTau);
    let expected = engine.expected_counts(&counts);
    let star = argmin(&expected);
    let delta_rat = rational_from(delta);
    if delta_rat.is_zero() {
        return Ok(trivial_result(p, engine.perms[star].clone(), true));
    }
    if n == 1 {
        return Ok(BoundResult::unbreakable());
    }

    let max_count = Metric::KendallTau.max_count(n);
    let in_far = far_set(
        (0..engine.perms.len()).map(|s| counts[star][s]),
        &delta_rat,
        max_count,
    );
    if in_far.iter().all(|&f| !f) {
        return Ok(BoundResult::unbreakable());
    }

    let mut best: Option<(BigRational, usize)> = None;
    for s in 0..engine.perms.len() {
        if !in_far[s] {
            continue;
        }
        let mut inner: Option<BigRational> = None;
        for v in 0..engine.perms.len() {
            if in_far[v] {
                continue;
            }
            let den = counts[star][s] as i64 - counts[star][v] as i64;
            if den <= 0 {
                continue;
            }
            let ratio =
                (&expected[s] - &expected[v]) / BigRational::from_integer(BigInt::from(den));
            inner = Some(match inner {
                None => ratio,
                Some(cur) => cur.max(ratio),
            });
        }
        if let Some(inner) = inner {
            if best.as_ref().map_or(true, |(b, _)| inner < *b) {
                best = Some((inner, s));
            }
        }
    }
    let (eps_rat, target) =
        best.expect("the near set contains the median, so every inner max is non-empty");
    let condition_ok =
        eps_rat <= BigRational::from_integer(BigInt::from(2)) * &engine.probs[star];
    let eps = eps_rat.to_f64().expect("small rational");
    let witness = if condition_ok {
        let budget = (eps * (1.0 + 1e-9)).min(2.0 * p.probs()[star]);
        reverse_attack(p, budget).ok()
    } else {
        None
    };
    Ok(BoundResult {
        value: BreakdownValue::Value(eps),
        condition_ok,
        witness,
        target: Some(engine.perms[target].clone()),
    })
}

/// Lower bound on the breakdown budget of the `metric_d` median when the
/// deviation is measured by `metric_m`: below this budget, no attack can
/// move the median `delta` away. Exact rational evaluation; unconditional,
/// so `condition_ok` is always true and no witness is produced.
pub fn epsilon_minus(
    p: &RankingDistribution,
    delta: f64,
    metric_m: Metric,
    metric_d: Metric,
) -> Result<BoundResult> {
    check_delta(delta)?;
    check_items(p.n(), 5)?;
    let n = p.n();
    let engine = Engine::new(p);
    let counts_d = engine.count_matrix(metric_d);
    let expected = engine.expected_counts(&counts_d);
    let star = argmin(&expected);
    let delta_rat = rational_from(delta);
    if delta_rat.is_zero() {
        return Ok(trivial_result(p, engine.perms[star].clone(), false));
    }
    if n == 1 {
        return Ok(BoundResult::unbreakable());
    }

    let counts_m = if metric_m == metric_d {
        None
    } else {
        Some(engine.count_matrix(metric_m))
    };
    let m_from_star = |s: usize| counts_m.as_ref().unwrap_or(&counts_d)[star][s];
    let in_far = far_set(
        (0..engine.perms.len()).map(m_from_star),
        &delta_rat,
        metric_m.max_count(n),
    );
    if in_far.iter().all(|&f| !f) {
        return Ok(BoundResult::unbreakable());
    }

    let total = engine.perms.len();
    let mut best: Option<(BigRational, usize)> = None;
    for s in 0..total {
        if !in_far[s] {
            continue;
        }
        let mut inner: Option<BigRational> = None;
        for v in 0..total {
            if v == s {
                continue;
            }
            // Worst-case denominator over all positions of the reference
            // ranking; independent of p.
            let den = (0..total)
                .map(|r| counts_d[r][s] as i64 - counts_d[r][v] as i64)
                .max()
                .expect("permutation list is non-empty");
            if den <= 0 {
                continue;
            }
            let ratio =
                (&expected[s] - &expected[v]) / BigRational::from_integer(BigInt::from(den));
            inner = Some(match inner {
                None => ratio,
                Some(cur) => cur.max(ratio),
            });
        }
        if let Some(inner) = inner {
            if best.as_ref().map_or(true, |(b, _)| inner < *b) {
                best = Some((inner, s));
            }
        }
    }
    let (eps_rat, target) =
        best.expect("distinct permutations always give a positive worst-case denominator");
    Ok(BoundResult {
        value: BreakdownValue::Value(eps_rat.to_f64().expect("small rational")),
        condition_ok: true,
        witness: None,
        target: Some(engine.perms[target].clone()),
    })
}

/// The reverse attack: shift `eps / 2` of probability mass from the Kemeny
/// median onto its reversal. Requires the median to carry at least `eps / 2`
/// of mass; total variation from `p` is exactly `eps / 2`.
pub fn reverse_attack(p: &RankingDistribution, eps: f64) -> Result<RankingDistribution> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "attack budget must be finite and nonnegative, got {eps}"
        )));
    }
    let star = metric_median(p, Metric::KendallTau).median;
    let star_idx = star.index().0;
    let mass = p.probs()[star_idx];
    if eps > 2.0 * mass + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "attack budget {eps} exceeds twice the median's mass {mass}"
        )));
    }
    let mut probs = p.probs().to_vec();
    let half = eps / 2.0;
    probs[star_idx] -= half;
    if probs[star_idx] < 0.0 {
        probs[star_idx] = 0.0;
    }
    probs[star.reverse().index().0] += half;
    RankingDistribution::new(p.n(), probs)
}

/// Exact check of what the reverse attack does to the Kemeny argmin: true
/// when, after shifting `eps / 2` of mass from the median of `p` to its
/// reversal, some member of the perturbed argmin set sits at normalized
/// Kendall distance at least `delta` from the original median. All
/// comparisons are rational, so ties and thresholds are resolved exactly.
pub fn reverse_attack_moves_median(
    p: &RankingDistribution,
    eps: f64,
    delta: f64,
) -> Result<bool> {
    check_delta(delta)?;
    check_items(p.n(), 6)?;
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "attack budget must be finite and nonnegative, got {eps}"
        )));
    }
    let n = p.n();
    let engine = Engine::new(p);
    let counts = engine.count_matrix(Metric::KendallTau);
    let expected = engine.expected_counts(&counts);
    let star = argmin(&expected);
    let delta_rat = rational_from(delta);
    if n == 1 {
        return Ok(delta_rat.is_zero());
    }
    let half = rational_from(eps) / BigRational::from_integer(BigInt::from(2));
    if half > engine.probs[star] {
        return Err(Error::InvalidParameter(format!(
            "attack budget {eps} exceeds twice the median's mass"
        )));
    }
    let rev = engine.perms[star].reverse().index().0;

    // Expected counts under the attacked distribution, patched in place.
    let attacked: Vec<BigRational> = (0..engine.perms.len())
        .map(|s| {
            &expected[s]
                + &half
                    * BigRational::from_integer(
                        BigInt::from(counts[rev][s]) - BigInt::from(counts[star][s]),
                    )
        })
        .collect();
    let min = attacked.iter().min().expect("non-empty").clone();
    let threshold = &delta_rat
        * BigRational::from_integer(BigInt::from(Metric::KendallTau.max_count(n)));
    Ok(attacked.iter().enumerate().any(|(s, u)| {
        *u == min && BigRational::from_integer(BigInt::from(counts[star][s])) >= threshold
    }))
}

/// Lower and upper breakdown bounds across a grid of deviation thresholds,
/// both on the Kendall metric. Raw per-threshold values; no monotone
/// cleanup is applied.
pub fn breakdown_curve_bounds(
    p: &RankingDistribution,
    delta_grid: &[f64],
) -> Result<(Vec<BoundResult>, Vec<BoundResult>)> {
    let mut lower = Vec::with_capacity(delta_grid.len());
    let mut upper = Vec::with_capacity(delta_grid.len());
    for &delta in delta_grid {
        lower.push(epsilon_minus(p, delta, Metric::KendallTau, Metric::KendallTau)?);
        upper.push(epsilon_plus(p, delta)?);
    }
    Ok((lower, upper))
}
