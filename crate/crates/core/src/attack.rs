use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bucket::{hausdorff, BucketRanking, HausdorffVariant};
use crate::bounds::BreakdownValue;
use crate::dist::{total_variation, RankingDistribution};
use crate::error::{Error, Result};
use crate::perm::factorial;
use crate::statistic::Statistic;

/// Tolerance under the target deviation within which an attack still counts
/// as successful, absorbing floating dust in the exact re-evaluation.
const BREAK_TOL: f64 = 1e-9;

fn default_gamma() -> f64 {
    0.1
}
fn default_mc_samples() -> usize {
    64
}
fn default_steps() -> usize {
    2000
}
fn default_eta_q() -> f64 {
    0.1
}
fn default_eta_lambda() -> f64 {
    0.5
}

/// Knobs of the saddle-point attack. `delta` is the deviation the adversary
/// must reach; everything else shapes the optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    /// Target deviation in [0, 1].
    pub delta: f64,
    /// Scale of the Gaussian logit noise used for smoothing; > 0.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Monte-Carlo samples per step; even (antithetic pairs) and >= 2.
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    /// Total descent/ascent steps.
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Base step size for the descent on the logits, decayed by 1/sqrt(s).
    #[serde(default = "default_eta_q")]
    pub eta_q: f64,
    /// Base step size for the ascent on the multiplier, decayed likewise.
    #[serde(default = "default_eta_lambda")]
    pub eta_lambda: f64,
    #[serde(default)]
    pub seed: u64,
    /// Which Hausdorff extension measures the deviation.
    #[serde(default)]
    pub variant: HausdorffVariant,
    /// Number of initial steps excluded from the iterate average, letting
    /// the multiplier find its level before averaging begins.
    #[serde(default)]
    pub burn_in: usize,
}

impl AttackConfig {
    pub fn new(delta: f64) -> Self {
        AttackConfig {
            delta,
            gamma: default_gamma(),
            mc_samples: default_mc_samples(),
            steps: default_steps(),
            eta_q: default_eta_q(),
            eta_lambda: default_eta_lambda(),
            seed: 0,
            variant: HausdorffVariant::default(),
            burn_in: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() || !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::InvalidParameter(format!(
                "target deviation must lie in [0, 1], got {}",
                self.delta
            )));
        }
        if !self.gamma.is_finite() || self.gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "smoothing scale must be positive, got {}",
                self.gamma
            )));
        }
        if self.mc_samples < 2 || self.mc_samples % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "sample count must be even and at least 2, got {}",
                self.mc_samples
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("step count must be positive".into()));
        }
        if !self.eta_q.is_finite() || self.eta_q <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "descent step size must be positive, got {}",
                self.eta_q
            )));
        }
        if !self.eta_lambda.is_finite() || self.eta_lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ascent step size must be positive, got {}",
                self.eta_lambda
            )));
        }
        if self.burn_in >= self.steps {
            return Err(Error::InvalidParameter(format!(
                "burn-in of {} leaves no steps to average out of {}",
                self.burn_in, self.steps
            )));
        }
        Ok(())
    }
}

/// One row of the optimization trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceStep {
    pub step: usize,
    pub tv: f64,
    pub rho_hat: f64,
    pub lambda: f64,
}

/// Outcome of an attack run.
#[derive(Debug, Clone, Serialize)]
pub struct AttackResult {
    /// Total variation TV(p, q_bar) when the attack reached the target
    /// deviation; unbreakable otherwise.
    pub eps_hat: BreakdownValue,
    /// TV(p, q_bar) regardless of success.
    pub tv: f64,
    /// Deviation of the attacked statistic output, recomputed exactly from
    /// `q_bar` rather than from the smoothed estimate.
    pub achieved_deviation: f64,
    /// Average of the post-update iterates.
    pub q_bar: RankingDistribution,
    pub lambda_final: f64,
    pub trace: Vec<TraceStep>,
}

impl AttackResult {
    pub fn breakable(&self) -> bool {
        !self.eps_hat.is_unbreakable()
    }

    /// The estimated budget on the L1 scale (twice the total variation).
    pub fn eps_hat_l1(&self) -> Option<f64> {
        self.eps_hat.as_f64().map(|v| 2.0 * v)
    }
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn tv_to_probs(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
}

/// Deviation of the statistic's output at the sample logits, handled by one
/// worker so the estimator below stays readable.
fn sample_deviation(
    t_p: &BucketRanking,
    statistic: &Statistic,
    variant: HausdorffVariant,
    n: usize,
    logits: &[f64],
) -> Result<f64> {
    let q = RankingDistribution::new(n, softmax(logits))?;
    hausdorff(variant, t_p, &statistic.apply(&q)?)
}

/// Monte-Carlo estimate of the smoothed deviation and its gradient in the
/// logits, by Gaussian perturbation with antithetic pairs and a mean
/// baseline: the deviation itself is piecewise constant in the logits, so
/// its almost-everywhere derivative carries no signal.
fn rho_smoothed_inner(
    rng: &mut ChaCha8Rng,
    t_p: &BucketRanking,
    statistic: &Statistic,
    cfg: &AttackConfig,
    n: usize,
    z: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let dim = z.len();
    let pairs = cfg.mc_samples / 2;
    let mut noises: Vec<Vec<f64>> = Vec::with_capacity(pairs);
    let mut values: Vec<(f64, f64)> = Vec::with_capacity(pairs);
    let mut shifted = vec![0.0; dim];
    for _ in 0..pairs {
        let xi: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        for (slot, (&base, &noise)) in shifted.iter_mut().zip(z.iter().zip(&xi)) {
            *slot = base + cfg.gamma * noise;
        }
        let plus = sample_deviation(t_p, statistic, cfg.variant, n, &shifted)?;
        for (slot, (&base, &noise)) in shifted.iter_mut().zip(z.iter().zip(&xi)) {
            *slot = base - cfg.gamma * noise;
        }
        let minus = sample_deviation(t_p, statistic, cfg.variant, n, &shifted)?;
        noises.push(xi);
        values.push((plus, minus));
    }
    let estimate =
        values.iter().map(|(a, b)| a + b).sum::<f64>() / cfg.mc_samples as f64;
    let mut grad = vec![0.0; dim];
    let scale = 1.0 / (cfg.mc_samples as f64 * cfg.gamma);
    for (xi, (plus, minus)) in noises.iter().zip(&values) {
        // Antithetic pairing folds the mean baseline into the difference.
        let weight = (plus - minus) * scale;
        for (g, &noise) in grad.iter_mut().zip(xi) {
            *g += weight * noise;
        }
    }
    Ok((estimate, grad))
}

/// Smoothed deviation of the statistic around the distribution with the
/// given logits, and the gradient estimate used by the attack. Seeded from
/// the config, so repeated calls are identical.
pub fn rho_smoothed(
    p: &RankingDistribution,
    z: &[f64],
    statistic: &Statistic,
    cfg: &AttackConfig,
) -> Result<(f64, Vec<f64>)> {
    cfg.validate()?;
    if z.len() != factorial(p.n()) {
        return Err(Error::SizeMismatch {
            expected: factorial(p.n()),
            got: z.len(),
        });
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("logits must be finite".into()));
    }
    let t_p = statistic.apply(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rho_smoothed_inner(&mut rng, &t_p, statistic, cfg, p.n(), z)
}

/// Exact deviation between a reference statistic output and the statistic's
/// output on `q`.
pub fn deviation_exact(
    t_p: &BucketRanking,
    q: &RankingDistribution,
    statistic: &Statistic,
    variant: HausdorffVariant,
) -> Result<f64> {
    if t_p.n() != q.n() {
        return Err(Error::SizeMismatch {
            expected: t_p.n(),
            got: q.n(),
        });
    }
    hausdorff(variant, t_p, &statistic.apply(q)?)
}

/// Runs the full saddle-point attack: descend on the logits of the attack
/// distribution (total variation cost against smoothed-deviation reward),
/// ascend on the multiplier enforcing the deviation target, and average the
/// post-update iterates. The attack succeeds when the averaged distribution,
/// re-evaluated exactly, moves the statistic by at least `delta`; the
/// reported budget is then the total variation actually spent.
pub fn estimate_breakdown(
    p: &RankingDistribution,
    statistic: &Statistic,
    cfg: &AttackConfig,
) -> Result<AttackResult> {
    cfg.validate()?;
    if p.n() > 6 {
        return Err(Error::ItemCountOutOfRange {
            got: p.n(),
            min: 1,
            max: 6,
        });
    }
    let n = p.n();
    let dim = factorial(n);
    let t_p = statistic.apply(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let floor = 1e-6;
    let floored: Vec<f64> = p.probs().iter().map(|&v| v + floor).collect();
    let floored_sum: f64 = floored.iter().sum();
    let mut z: Vec<f64> = floored.iter().map(|&v| (v / floored_sum).ln()).collect();
    let mut lambda = 1.0;

    let mut q_sum = vec![0.0; dim];
    let mut averaged = 0usize;
    let mut trace = Vec::with_capacity(cfg.steps);
    for step in 1..=cfg.steps {
        let decay = 1.0 / (step as f64).sqrt();
        let (rho_hat, grad_rho) = rho_smoothed_inner(&mut rng, &t_p, statistic, cfg, n, &z)?;
        let q = softmax(&z);
        let signs: Vec<f64> = q
            .iter()
            .zip(p.probs())
            .map(|(&qi, &pi)| 0.5 * (qi - pi).signum())
            .collect();
        let pivot: f64 = signs.iter().zip(&q).map(|(s, qi)| s * qi).sum();
        for j in 0..dim {
            let grad_tv = q[j] * (signs[j] - pivot);
            z[j] -= cfg.eta_q * decay * (grad_tv - lambda * grad_rho[j]);
        }
        lambda = (lambda + cfg.eta_lambda * decay * (cfg.delta - rho_hat)).max(0.0);

        let q_post = softmax(&z);
        if !lambda.is_finite()
            || !rho_hat.is_finite()
            || q_post.iter().any(|v| !v.is_finite())
        {
            return Err(Error::AttackDiverged { step, trace });
        }
        trace.push(TraceStep {
            step,
            tv: tv_to_probs(p.probs(), &q_post),
            rho_hat,
            lambda,
        });
        if step > cfg.burn_in {
            for (acc, &v) in q_sum.iter_mut().zip(&q_post) {
                *acc += v;
            }
            averaged += 1;
        }
    }

    let q_bar = RankingDistribution::new(
        n,
        q_sum.iter().map(|&v| v / averaged as f64).collect(),
    )?;
    let achieved_deviation = deviation_exact(&t_p, &q_bar, statistic, cfg.variant)?;
    let tv = total_variation(p, &q_bar)?;
    let eps_hat = if achieved_deviation >= cfg.delta - BREAK_TOL {
        BreakdownValue::Value(tv)
    } else {
        BreakdownValue::Unbreakable
    };
    Ok(AttackResult {
        eps_hat,
        tv,
        achieved_deviation,
        q_bar,
        lambda_final: lambda,
        trace,
    })
}
