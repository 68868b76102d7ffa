//! Experiment execution: breakdown curves and loss/robustness tradeoffs,
//! written as versioned CSV artifacts that reproduce byte-for-byte under a
//! fixed spec and seed.

use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rankrobust::{
    epsilon_minus, epsilon_plus, estimate_breakdown, loss, AttackResult, BreakdownValue, Metric,
};
use sha2::{Digest, Sha256};

use crate::io::resolve_out_path;
use crate::spec::{CurveSpec, TradeoffSpec};

pub const CURVE_SCHEMA: &str = "curve-v1";
pub const TRADEOFF_SCHEMA: &str = "tradeoff-v1";

pub const CURVE_COLUMNS: [&str; 7] = [
    "delta",
    "eps_lower",
    "eps_upper",
    "eps_hat",
    "eps_hat_l1",
    "achieved_deviation",
    "condition_ok",
];

pub const TRADEOFF_COLUMNS: [&str; 7] = [
    "distribution",
    "statistic",
    "delta",
    "loss",
    "eps_hat",
    "eps_hat_l1",
    "achieved_deviation",
];

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic per-cell seed from the root seed and two cell coordinates,
/// so reruns reproduce and distinct cells decorrelate.
pub fn derive_seed(root: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(root) ^ a) ^ b)
}

/// The run with the median estimated budget. Unbreakable runs sort after all
/// breakable ones, so the median is finite exactly when a strict majority of
/// runs broke the statistic. Even counts take the upper middle.
pub fn median_run(mut runs: Vec<AttackResult>) -> AttackResult {
    assert!(!runs.is_empty());
    runs.sort_by(|a, b| {
        (a.eps_hat.is_unbreakable(), a.tv)
            .partial_cmp(&(b.eps_hat.is_unbreakable(), b.tv))
            .expect("total variation is never NaN")
    });
    let mid = runs.len() / 2;
    runs.swap_remove(mid)
}

/// Deviation grid of all attainable Kendall values for `n` items.
pub fn default_delta_grid(n: usize) -> Vec<f64> {
    let pairs = n * (n - 1) / 2;
    (1..=pairs).map(|k| k as f64 / pairs as f64).collect()
}

/// Smallest positive attainable Kendall deviation for `n` items.
pub fn default_delta(n: usize) -> f64 {
    1.0 / (n * (n - 1) / 2) as f64
}

fn format_breakdown(value: &BreakdownValue) -> String {
    match value {
        BreakdownValue::Value(v) => v.to_string(),
        BreakdownValue::Unbreakable => "unbreakable".to_string(),
    }
}

fn config_sha256(config_json: &str) -> String {
    let digest = Sha256::digest(config_json.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Creates the artifact file with its `# schema=... config_sha256=... seed=...`
/// comment line and hands back a CSV writer positioned after it.
fn artifact_writer(
    path: &Path,
    schema: &str,
    config_json: &str,
    seed: u64,
) -> Result<csv::Writer<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let mut file =
        File::create(path).with_context(|| format!("creating {}", path.display()))?;
    writeln!(
        file,
        "# schema={schema} config_sha256={} seed={seed}",
        config_sha256(config_json)
    )?;
    Ok(csv::Writer::from_writer(file))
}

/// Runs one breakdown curve and writes it to `out` (reinterpreted under the
/// output-directory override when relative). One row per grid point: exact
/// lower/upper bounds plus the median attack run. Returns the written path.
pub fn run_breakdown_curve(spec: &CurveSpec, out: &Path) -> Result<PathBuf> {
    if spec.reps == 0 {
        bail!("reps must be positive");
    }
    let p = spec.distribution.build()?;
    let grid = match &spec.delta_grid {
        Some(grid) if grid.is_empty() => bail!("delta_grid must not be empty"),
        Some(grid) => grid.clone(),
        None => default_delta_grid(p.n()),
    };
    let config_json = serde_json::to_string(spec)?;
    let path = resolve_out_path(out);
    let mut writer = artifact_writer(&path, CURVE_SCHEMA, &config_json, spec.seed)?;
    writer.write_record(CURVE_COLUMNS)?;

    for (di, &delta) in grid.iter().enumerate() {
        let lower = epsilon_minus(&p, delta, Metric::KendallTau, Metric::KendallTau)?;
        let upper = epsilon_plus(&p, delta)?;
        let runs = (0..spec.reps)
            .map(|rep| {
                let cfg = spec
                    .attack
                    .config(delta, derive_seed(spec.seed, di as u64, rep as u64));
                estimate_breakdown(&p, &spec.statistic, &cfg)
            })
            .collect::<rankrobust::Result<Vec<_>>>()?;
        let run = median_run(runs);
        writer.write_record([
            delta.to_string(),
            format_breakdown(&lower.value),
            if upper.condition_ok {
                format_breakdown(&upper.value)
            } else {
                String::new()
            },
            format_breakdown(&run.eps_hat),
            run.eps_hat_l1().map(|v| v.to_string()).unwrap_or_default(),
            run.achieved_deviation.to_string(),
            upper.condition_ok.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(path)
}

/// Runs the full distribution x statistic tradeoff study at one deviation
/// threshold and writes it to `out`. The loss column is exact; the breakdown
/// columns come from the median attack run, with seeds shared across
/// statistics of the same distribution. Returns the written path.
pub fn run_tradeoff(spec: &TradeoffSpec, out: &Path) -> Result<PathBuf> {
    if spec.reps == 0 {
        bail!("reps must be positive");
    }
    if spec.distributions.is_empty() || spec.statistics.is_empty() {
        bail!("tradeoff needs at least one distribution and one statistic");
    }
    let config_json = serde_json::to_string(spec)?;
    let path = resolve_out_path(out);
    let mut writer = artifact_writer(&path, TRADEOFF_SCHEMA, &config_json, spec.seed)?;
    writer.write_record(TRADEOFF_COLUMNS)?;

    for (di, dist_spec) in spec.distributions.iter().enumerate() {
        let p = dist_spec.build()?;
        let delta = spec.delta.unwrap_or_else(|| default_delta(p.n()));
        for statistic in &spec.statistics {
            let output = statistic.apply(&p)?;
            let loss_value = loss(&output, &p)?;
            let runs = (0..spec.reps)
                .map(|rep| {
                    let cfg = spec
                        .attack
                        .config(delta, derive_seed(spec.seed, di as u64, rep as u64));
                    estimate_breakdown(&p, statistic, &cfg)
                })
                .collect::<rankrobust::Result<Vec<_>>>()?;
            let run = median_run(runs);
            writer.write_record([
                dist_spec.label(),
                statistic.label(),
                delta.to_string(),
                loss_value.to_string(),
                format_breakdown(&run.eps_hat),
                run.eps_hat_l1().map(|v| v.to_string()).unwrap_or_default(),
                run.achieved_deviation.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{AttackSettings, DistributionSpec};
    use rankrobust::Statistic;

    fn quick_attack() -> AttackSettings {
        AttackSettings {
            mc_samples: 8,
            steps: 30,
            ..AttackSettings::default()
        }
    }

    #[test]
    fn derived_seeds_are_stable_and_distinct() {
        let a = derive_seed(0, 0, 0);
        let b = derive_seed(0, 0, 1);
        let c = derive_seed(0, 1, 0);
        let d = derive_seed(1, 0, 0);
        assert_eq!(a, derive_seed(0, 0, 0));
        assert!(a != b && a != c && a != d && b != c);
    }

    #[test]
    fn median_run_prefers_breakable_majorities() {
        let p = rankrobust::plackett_luce_random(3, 5).unwrap();
        let cfg = quick_attack().config(0.0, 3);
        let run = rankrobust::estimate_breakdown(&p, &Statistic::Kemeny, &cfg).unwrap();
        let mut runs = vec![run.clone(), run.clone(), run];
        runs[0].tv = 0.3;
        runs[1].tv = 0.1;
        runs[2].tv = 0.2;
        for r in &mut runs {
            r.eps_hat = BreakdownValue::Value(r.tv);
        }
        assert_eq!(median_run(runs).tv, 0.2);
    }

    #[test]
    fn default_grids_cover_attainable_values() {
        assert_eq!(default_delta_grid(3), vec![1.0 / 3.0, 2.0 / 3.0, 1.0]);
        assert_eq!(default_delta(4), 1.0 / 6.0);
    }

    #[test]
    fn curve_runs_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let spec = CurveSpec {
            distribution: DistributionSpec::PlackettLuceRandom { n: 3, seed: 2 },
            statistic: Statistic::Kemeny,
            delta_grid: None,
            attack: quick_attack(),
            seed: 11,
            reps: 3,
        };
        let first = run_breakdown_curve(&spec, &dir.path().join("a.csv")).unwrap();
        let second = run_breakdown_curve(&spec, &dir.path().join("b.csv")).unwrap();
        let a = std::fs::read(first).unwrap();
        let b = std::fs::read(second).unwrap();
        assert_eq!(a, b);

        let text = String::from_utf8(a).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("# schema=curve-v1 config_sha256="));
        assert!(header.ends_with("seed=11"));
        assert_eq!(lines.next().unwrap(), CURVE_COLUMNS.join(","));
        assert_eq!(lines.count(), 3);
    }

    #[test]
    fn tradeoff_rows_cover_the_cross_product() {
        let dir = tempfile::tempdir().unwrap();
        let spec = TradeoffSpec {
            distributions: vec![
                DistributionSpec::UniformIsh { n: 3 },
                DistributionSpec::PlackettLuceRandom { n: 3, seed: 4 },
            ],
            statistics: vec![Statistic::Kemeny, Statistic::Constant],
            delta: None,
            attack: quick_attack(),
            seed: 0,
            reps: 1,
        };
        let path = run_tradeoff(&spec, &dir.path().join("t.csv")).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2 + 4);
        assert_eq!(lines[1], TRADEOFF_COLUMNS.join(","));
        let constant_rows: Vec<&&str> =
            lines.iter().filter(|l| l.contains("constant")).collect();
        assert_eq!(constant_rows.len(), 2);
        for row in constant_rows {
            assert!(row.contains("unbreakable"), "{row}");
        }
    }
}
