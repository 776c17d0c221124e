//! Closed-form engine: waiting-time expectations, swap outcomes averaged over
//! the memory decay, distribution-time formulas, and the cutoff-model averages.
//!
//! Everything in this module is a pure function of validated inputs. The
//! Monte Carlo engine in [`crate::montecarlo`] estimates the same quantities
//! by trial simulation; the two routes are kept strictly independent so each
//! can check the other.

mod cutoff;
mod rate;
mod swap;
mod waiting;

pub use cutoff::{cutoff_avg_ps, cutoff_avg_ps_discrete, exponential_avg_ps};
pub use rate::{delivered_rate, edt_postselected, edt_two_link, BetaAssumption, RateResult};
pub use swap::{
    avg_swap_single, avg_swap_two_photon, generation, swap_single_photon, swap_two_photon,
    AvgSingleSwap, GenerationOutcome, SwapOutcome,
};
pub use waiting::{
    attempt_expectations, expected_decay_factor, geometric_pmf, ndif_pmf, LinkStatistics,
};
