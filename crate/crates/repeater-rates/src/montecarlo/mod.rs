//! Trial-level stochastic simulator; the independent check on every closed
//! form in [`crate::analytic`].
//!
//! # Determinism
//!
//! Every estimator here is bit-reproducible from its config alone, on any
//! number of worker threads. Trials are processed in fixed chunks of
//! [`TRIAL_CHUNK`]; each chunk draws from its own counter-mode RNG stream
//! (`master_seed` selects the key, the chunk index selects the stream), and
//! chunk results are reduced sequentially in chunk order with compensated
//! summation. Worker threads only decide *when* a chunk runs, never what it
//! contains, so the schedule cannot leak into the numbers.

mod estimator;
mod postselect;
mod rng;
mod twolink;
mod validate;

pub use estimator::{Estimate, EstimatorReport, SwapAttempt, TrialRecord};
pub use postselect::simulate_postselected;
pub use rng::{sample_geometric, splitmix64};
pub use twolink::{simulate_two_link, LinkModel, SimConfig};
pub use validate::{
    compare_cutoff_vs_exponential, estimate_beta, validate_tdif_distribution, BetaConfig,
    CutoffCompareConfig, TdifConfig,
};

/// Trials per RNG stream and per work item. Part of the reproducibility
/// contract: changing it reshuffles every stream, exactly like changing the
/// master seed.
pub const TRIAL_CHUNK: u64 = 4096;

/// Quantity names used in [`EstimatorReport`]s, so callers and tests address
/// estimates by one vocabulary.
pub mod keys {
    /// Mean wall-clock delivery time, seconds.
    pub const EDT_S: &str = "edt_s";
    /// Swap attempts per completed trial.
    pub const SWAP_ATTEMPTS: &str = "swap_attempts_per_trial";
    /// Completed trials over all trials.
    pub const SUCCESS_RATE: &str = "success_rate";
    /// Per-attempt analytic success probability, averaged over attempts.
    pub const MEAN_PS: &str = "mean_ps";
    /// Per-attempt post-swap fidelity, averaged over all attempts.
    pub const ALPHA_UNCONDITIONAL: &str = "alpha_unconditional";
    /// Post-swap fidelity of the heralded attempt only.
    pub const FINAL_ALPHA: &str = "final_alpha_given_success";
    /// Per-attempt waiting statistics.
    pub const N_MAX: &str = "n_max_per_attempt";
    pub const N_MIN: &str = "n_min_per_attempt";
    pub const N_DIF: &str = "n_dif_per_attempt";
    /// Postselection rounds per delivered pair.
    pub const POSTSELECT_ROUNDS: &str = "postselect_rounds";
    /// Chain fidelity at chain completion, all rounds.
    pub const CHAIN_ALPHA_UNCONDITIONAL: &str = "chain_alpha_unconditional";
    /// Chain fidelity on the delivering round only.
    pub const CHAIN_ALPHA_GIVEN_SUCCESS: &str = "chain_alpha_given_success";
    /// Per-round postselection success probability, averaged over rounds.
    pub const MEAN_POSTSELECT_PROB: &str = "mean_postselect_prob";
    /// Correlation ratio <n_dif p_s> / (<n_dif><p_s>).
    pub const BETA: &str = "beta";
    /// Total-variation distance, empirical vs geometric-difference model.
    pub const TV_DISTANCE: &str = "tv_distance";
    /// Chain-pair completion-time statistics, units of t0.
    pub const T_MAX_UNITS: &str = "t_max_units";
    pub const T_MIN_UNITS: &str = "t_min_units";
    pub const T_DIF_UNITS: &str = "t_dif_units";
    /// Geometric-model predictions printed next to the empirical values.
    pub const T_MAX_MODEL_UNITS: &str = "t_max_model_units";
    pub const T_MIN_MODEL_UNITS: &str = "t_min_model_units";
    /// Deadline-model and exponential-model swap averages (prefactor 1).
    pub const PS_CUTOFF: &str = "ps_cutoff";
    pub const PS_EXP_SINGLE: &str = "ps_exp_single_decay";
    pub const PS_EXP_DOUBLE: &str = "ps_exp_double_decay";
}
