use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rankrobust::{
    downward_merge, epsilon_minus, epsilon_plus, estimate_breakdown, metric_median, naive_merge,
    AttackConfig, HausdorffVariant, Metric, PairwiseMatrix, Permutation, RankingDistribution,
    Statistic,
};
use rankrobust_cli::{load_json, run_breakdown_curve, run_tradeoff, CurveSpec, TradeoffSpec};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "rankrobust",
    version,
    about = "Consensus rankings under adversarial corruption: medians, breakdown bounds, attacks, merges, and experiment artifacts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MergeStrategy {
    Naive,
    Downward,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Ns,
    Half,
}

impl From<Variant> for HausdorffVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Ns => HausdorffVariant::Ns,
            Variant::Half => HausdorffVariant::Half,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact metric median of a distribution loaded from JSON.
    Median {
        /// Path to a ranking distribution file.
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, default_value = "kendall_tau")]
        metric: String,
    },
    /// Distance between two complete rankings given as comma-separated ranks.
    Distance {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "kendall_tau")]
        metric: String,
    },
    /// Lower and upper breakdown bounds at one or more deviation thresholds.
    Bounds {
        #[arg(long)]
        dist: PathBuf,
        /// Deviation thresholds; repeatable or comma-separated.
        #[arg(long = "delta", required = true, num_args = 1.., value_delimiter = ',')]
        deltas: Vec<f64>,
        /// Metric measuring the deviation for the lower bound.
        #[arg(long, default_value = "kendall_tau")]
        deviation_metric: String,
    },
    /// Run the smoothed saddle-point attack against a statistic.
    Attack {
        #[arg(long)]
        dist: PathBuf,
        /// kemeny | borda | constant | naive_merge:<theta> | downward_merge:<theta>
        #[arg(long, default_value = "kemeny")]
        statistic: String,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        mc_samples: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        eta_q: Option<f64>,
        #[arg(long)]
        eta_lambda: Option<f64>,
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Variant::Ns)]
        variant: Variant,
    },
    /// Coarsen a median into a bucket ranking via near-tie merging.
    Merge {
        /// Path to a pairwise preference matrix file.
        #[arg(long)]
        matrix: PathBuf,
        /// Median ranking as comma-separated ranks, e.g. 1,2,3,4.
        #[arg(long)]
        median: String,
        #[arg(long)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = MergeStrategy::Downward)]
        strategy: MergeStrategy,
    },
    /// Run a breakdown-curve experiment spec and write its CSV artifact.
    Curve {
        #[arg(long)]
        spec: PathBuf,
        /// Output CSV; relative paths honor RANKROBUST_OUT_DIR.
        #[arg(long, default_value = "curve.csv")]
        out: PathBuf,
    },
    /// Run a loss/robustness tradeoff spec and write its CSV artifact.
    Tradeoff {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "tradeoff.csv")]
        out: PathBuf,
    },
}

fn parse_ranks(text: &str) -> Result<Permutation> {
    let ranks = text
        .split(',')
        .map(|part| part.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .with_context(|| format!("parsing ranks from '{text}'"))?;
    Ok(Permutation::from_ranks(ranks)?)
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Median { dist, metric } => {
            let p: RankingDistribution = load_json(&dist)?;
            let metric: Metric = metric.parse()?;
            let result = metric_median(&p, metric);
            print_json(&json!({
                "metric": metric.to_string(),
                "median": result.median,
                "objective": result.objective,
                "argmin_size": result.argmin_set.len(),
            }))
        }
        Command::Distance { a, b, metric } => {
            let metric: Metric = metric.parse()?;
            let value = metric.distance(&parse_ranks(&a)?, &parse_ranks(&b)?)?;
            print_json(&json!({ "metric": metric.to_string(), "distance": value }))
        }
        Command::Bounds { dist, deltas, deviation_metric } => {
            let p: RankingDistribution = load_json(&dist)?;
            let metric_m: Metric = deviation_metric.parse()?;
            let mut rows = Vec::new();
            for delta in deltas {
                let lower = epsilon_minus(&p, delta, metric_m, Metric::KendallTau)?;
                let upper = epsilon_plus(&p, delta)?;
                rows.push(json!({
                    "delta": delta,
                    "eps_lower": lower.value,
                    "eps_upper": upper.value,
                    "condition_ok": upper.condition_ok,
                }));
            }
            print_json(&serde_json::Value::Array(rows))
        }
        Command::Attack {
            dist,
            statistic,
            delta,
            gamma,
            mc_samples,
            steps,
            eta_q,
            eta_lambda,
            burn_in,
            seed,
            variant,
        } => {
            let p: RankingDistribution = load_json(&dist)?;
            let statistic: Statistic = statistic.parse()?;
            let base = AttackConfig::new(delta);
            let config = AttackConfig {
                gamma: gamma.unwrap_or(base.gamma),
                mc_samples: mc_samples.unwrap_or(base.mc_samples),
                steps: steps.unwrap_or(base.steps),
                eta_q: eta_q.unwrap_or(base.eta_q),
                eta_lambda: eta_lambda.unwrap_or(base.eta_lambda),
                burn_in: burn_in.unwrap_or(base.burn_in),
                seed,
                variant: variant.into(),
                ..base
            };
            let result = estimate_breakdown(&p, &statistic, &config)?;
            print_json(&json!({
                "statistic": statistic.label(),
                "delta": delta,
                "eps_hat": result.eps_hat,
                "eps_hat_l1": result.eps_hat_l1(),
                "breakable": result.breakable(),
                "tv": result.tv,
                "achieved_deviation": result.achieved_deviation,
                "lambda_final": result.lambda_final,
            }))
        }
        Command::Merge { matrix, median, theta, strategy } => {
            let mat: PairwiseMatrix = load_json(&matrix)?;
            let median = parse_ranks(&median)?;
            let merged = match strategy {
                MergeStrategy::Naive => naive_merge(&median, &mat, theta)?,
                MergeStrategy::Downward => downward_merge(&median, &mat, theta)?,
            };
            print_json(&json!({ "buckets": merged }))
        }
        Command::Curve { spec, out } => {
            let spec: CurveSpec = load_json(&spec)?;
            let path = run_breakdown_curve(&spec, &out)?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Tradeoff { spec, out } => {
            let spec: TradeoffSpec = load_json(&spec)?;
            let path = run_tradeoff(&spec, &out)?;
            println!("{}", path.display());
            Ok(())
        }
    }
}
