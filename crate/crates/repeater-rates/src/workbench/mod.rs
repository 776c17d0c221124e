//! Config files, result tables, sweeps, validation suites, and the CLI that
//! drives them.
//!
//! A run's lifecycle: resolve a [`RunConfig`] from file plus flags, evaluate
//! (closed forms, simulation, or both), and write a `manifest.toml` next to
//! the result tables. The manifest is itself a complete config: loading it
//! back reruns the identical computation, including every seed. Tables
//! serialize to CSV and JSON with the same parsed values either way.

mod cli;
mod config;
mod sweep;
mod table;
pub mod thresholds;
mod validate;

pub use cli::cli_main;
pub use config::{
    CompareCutoffSection, DistanceSweepSection, EngineKind, EngineSection, ManifestMeta,
    MemorySweepSection, OutputFormat, OutputSection, RunConfig, SchemeSection, ValidateSection,
};
pub use sweep::{
    distance_sweep, iso_rate_curve, lin_space, log_space, mc_rate, memory_sweep, McRate,
};
pub use table::{format_float, Cell, ResultTable};
pub use validate::{
    beta_p0_grid, chain_regime_reports, cross_engine_cases, run_suite, CheckLine, Status,
    SuiteReport, BETA_ALPHA_GRID, BETA_ETA_D, BETA_R_GRID, CUTOFF_P0_GRID, CUTOFF_RATIO_GRID,
    CUTOFF_REFERENCE_RATIOS, SUITES, TDIF_ALPHA0, TDIF_ETA_D, TDIF_REGIMES,
};
