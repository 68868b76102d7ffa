//! Support library for the `rankrobust` binary: experiment specifications,
//! deterministic CSV artifact runners, and JSON file plumbing.

pub mod io;
pub mod runner;
pub mod spec;

pub use io::{load_json, resolve_out_path, save_json, OUT_DIR_ENV};
pub use runner::{
    default_delta, default_delta_grid, derive_seed, median_run, run_breakdown_curve,
    run_tradeoff, CURVE_COLUMNS, CURVE_SCHEMA, TRADEOFF_COLUMNS, TRADEOFF_SCHEMA,
};
pub use spec::{AttackSettings, CurveSpec, DistributionSpec, TradeoffSpec};
