//! Performance modeling for two-link quantum repeaters backed by atomic-ensemble
//! memories whose retrieval efficiency decays exponentially while a stored
//! excitation waits.
//!
//! The crate computes entanglement distribution times (EDT) and rates for four
//! source/measurement configurations, via two independent engines:
//!
//! * [`analytic`]: closed-form waiting-time statistics, decay-averaged swap
//!   outcomes, and EDT formulas (exact for single-photon swaps, bounds plus a
//!   midpoint for two-photon swaps, and the postselected four-link delivery
//!   time).
//! * [`montecarlo`]: a trial-level simulator of the same protocols with
//!   deterministic per-trial random substreams, used to validate every
//!   approximation the closed forms make.
//!
//! [`model`] holds the scheme/parameter types and hardware presets; [`workbench`]
//! provides parameter sweeps, result tables (CSV/JSON), run manifests, and the
//! validation suites behind the `repeater-rates` command-line tool.
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run --release --example rate_presets
//! cargo run --release --example memory_tradeoff_grid
//! cargo run --release --example distance_comparison
//! cargo run --release --example two_link_monte_carlo
//! cargo run --release --example postselection_rate
//! cargo run --release --example swap_correlation_ratio
//! cargo run --release --example chain_time_statistics
//! cargo run --release --example cutoff_comparison
//! ```

pub mod analytic;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod workbench;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
