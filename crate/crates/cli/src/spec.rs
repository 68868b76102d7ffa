//! JSON-facing experiment specifications: distributions by name or by data,
//! attack tuning knobs, and the two study layouts (curves and tradeoffs).

use anyhow::{bail, Result};
use rankrobust::{
    make_named, plackett_luce, plackett_luce_random, AttackConfig, HausdorffVariant, NamedFamily,
    Permutation, RankingDistribution, Statistic,
};
use serde::{Deserialize, Serialize};

fn default_eta() -> f64 {
    0.95
}

fn default_gap() -> f64 {
    0.1
}

fn default_reps() -> usize {
    1
}

fn default_statistic() -> Statistic {
    Statistic::Kemeny
}

/// How to construct a ranking distribution: one of the named families (on an
/// optional base ranking, identity by default), a Plackett-Luce model, or an
/// explicit probability vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    #[serde(rename = "uniform-ish")]
    UniformIsh { n: usize },
    #[serde(rename = "pointmass-ish")]
    PointmassIsh {
        n: usize,
        #[serde(default = "default_eta")]
        eta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma0: Option<Vec<usize>>,
    },
    #[serde(rename = "bucket-ish")]
    BucketIsh {
        n: usize,
        #[serde(default = "default_eta")]
        eta: f64,
        #[serde(default = "default_gap")]
        gap: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma0: Option<Vec<usize>>,
    },
    PlackettLuce { weights: Vec<f64> },
    PlackettLuceRandom { n: usize, seed: u64 },
    Explicit { n: usize, probs: Vec<f64> },
}

impl DistributionSpec {
    pub fn n(&self) -> usize {
        match self {
            DistributionSpec::UniformIsh { n }
            | DistributionSpec::PointmassIsh { n, .. }
            | DistributionSpec::BucketIsh { n, .. }
            | DistributionSpec::PlackettLuceRandom { n, .. }
            | DistributionSpec::Explicit { n, .. } => *n,
            DistributionSpec::PlackettLuce { weights } => weights.len(),
        }
    }

    pub fn build(&self) -> Result<RankingDistribution> {
        let p = match self {
            DistributionSpec::UniformIsh { n } => {
                make_named(NamedFamily::UniformIsh, &Permutation::identity(*n)?, 0.0, 0.0)?
            }
            DistributionSpec::PointmassIsh { n, eta, sigma0 } => make_named(
                NamedFamily::PointmassIsh,
                &base_ranking(*n, sigma0)?,
                *eta,
                0.0,
            )?,
            DistributionSpec::BucketIsh { n, eta, gap, sigma0 } => make_named(
                NamedFamily::BucketIsh,
                &base_ranking(*n, sigma0)?,
                *eta,
                *gap,
            )?,
            DistributionSpec::PlackettLuce { weights } => plackett_luce(weights)?,
            DistributionSpec::PlackettLuceRandom { n, seed } => plackett_luce_random(*n, *seed)?,
            DistributionSpec::Explicit { n, probs } => {
                RankingDistribution::new(*n, probs.clone())?
            }
        };
        Ok(p)
    }

    /// Stable one-line name used in CSV rows.
    pub fn label(&self) -> String {
        match self {
            DistributionSpec::UniformIsh { n } => format!("uniform-ish(n={n})"),
            DistributionSpec::PointmassIsh { n, eta, sigma0 } => {
                format!("pointmass-ish(n={n},eta={eta}{})", base_suffix(sigma0))
            }
            DistributionSpec::BucketIsh { n, eta, gap, sigma0 } => {
                format!(
                    "bucket-ish(n={n},eta={eta},gap={gap}{})",
                    base_suffix(sigma0)
                )
            }
            DistributionSpec::PlackettLuce { weights } => {
                format!("plackett_luce(weights={weights:?})")
            }
            DistributionSpec::PlackettLuceRandom { n, seed } => {
                format!("plackett_luce_random(n={n},seed={seed})")
            }
            DistributionSpec::Explicit { n, .. } => format!("explicit(n={n})"),
        }
    }
}

fn base_ranking(n: usize, sigma0: &Option<Vec<usize>>) -> Result<Permutation> {
    match sigma0 {
        None => Ok(Permutation::identity(n)?),
        Some(ranks) => {
            if ranks.len() != n {
                bail!("sigma0 has {} ranks but n = {n}", ranks.len());
            }
            Ok(Permutation::from_ranks(ranks.clone())?)
        }
    }
}

fn base_suffix(sigma0: &Option<Vec<usize>>) -> String {
    match sigma0 {
        None => String::new(),
        Some(ranks) => format!(",sigma0={ranks:?}"),
    }
}

/// Attack knobs without the per-point target deviation; defaults match
/// [`AttackConfig::new`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct AttackSettings {
    pub gamma: f64,
    pub mc_samples: usize,
    pub steps: usize,
    pub eta_q: f64,
    pub eta_lambda: f64,
    pub burn_in: usize,
    pub variant: HausdorffVariant,
}

impl Default for AttackSettings {
    fn default() -> Self {
        let base = AttackConfig::new(0.0);
        AttackSettings {
            gamma: base.gamma,
            mc_samples: base.mc_samples,
            steps: base.steps,
            eta_q: base.eta_q,
            eta_lambda: base.eta_lambda,
            burn_in: base.burn_in,
            variant: base.variant,
        }
    }
}

impl AttackSettings {
    pub fn config(&self, delta: f64, seed: u64) -> AttackConfig {
        AttackConfig {
            delta,
            gamma: self.gamma,
            mc_samples: self.mc_samples,
            steps: self.steps,
            eta_q: self.eta_q,
            eta_lambda: self.eta_lambda,
            burn_in: self.burn_in,
            variant: self.variant,
            seed,
        }
    }
}

/// One breakdown curve: a distribution, a statistic, and a deviation grid.
/// `delta_grid` defaults to the attainable Kendall values k / C(n, 2); the
/// attack runs `reps` times per grid point and the row reports the run with
/// the median estimated budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSpec {
    pub distribution: DistributionSpec,
    #[serde(default = "default_statistic")]
    pub statistic: Statistic,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub attack: AttackSettings,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_reps")]
    pub reps: usize,
}

/// A loss/robustness study: every listed statistic runs on every listed
/// distribution at one fixed deviation (default 1 / C(n, 2), the smallest
/// move the Kendall distance can see). Attack seeds are shared across
/// statistics so paired rows face the same randomness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TradeoffSpec {
    pub distributions: Vec<DistributionSpec>,
    pub statistics: Vec<Statistic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default)]
    pub attack: AttackSettings,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_reps")]
    pub reps: usize,
}
