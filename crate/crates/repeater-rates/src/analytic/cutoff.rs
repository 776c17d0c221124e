//! Average swap success under the two simplified decoherence conventions
//! used for the memory-policy comparison: a hard storage deadline versus
//! exponential decay, both with the swap prefactor normalized to 1.
//!
//! The deadline budget covers the stored pair, so a link that waited
//! `n_dif * t0` has spent `2 n_dif t0` of it.

use crate::{Error, Result};

use super::waiting::expected_decay_factor;

fn check_inputs(p0: f64, tau_m_s: f64, t0_s: f64) -> Result<()> {
    if !(p0.is_finite() && p0 > 0.0 && p0 <= 1.0) {
        return Err(Error::InvalidParameter {
            field: "p0",
            value: format!("{p0}"),
            allowed: "(0, 1]",
        });
    }
    if !(tau_m_s >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "tau_m_s",
            value: format!("{tau_m_s}"),
            allowed: "[0, inf]",
        });
    }
    if !(t0_s.is_finite() && t0_s > 0.0) {
        return Err(Error::InvalidParameter {
            field: "t0_s",
            value: format!("{t0_s}"),
            allowed: "(0, inf)",
        });
    }
    Ok(())
}

/// Probability the wait stays inside the deadline, with the exponent kept
/// continuous: `1 - 2 (1-p0)^{tau_m / 2 t0} / (2 - p0)`.
///
/// The continuous exponent is an approximation; for deadlines shorter than
/// about one attempt it dips below zero and is clamped to 0 here. The exact
/// discrete sum is [`cutoff_avg_ps_discrete`].
pub fn cutoff_avg_ps(p0: f64, tau_m_s: f64, t0_s: f64) -> Result<f64> {
    check_inputs(p0, tau_m_s, t0_s)?;
    if tau_m_s.is_infinite() {
        return Ok(1.0);
    }
    let x = tau_m_s / (2.0 * t0_s);
    let pow = (x * (-p0).ln_1p()).exp();
    Ok((1.0 - 2.0 * pow / (2.0 - p0)).max(0.0))
}

/// Exact deadline-survival probability: the wait is an integer number of
/// attempts, so the bound is `n_dif <= floor(tau_m / 2 t0)` and the sum
/// telescopes to `1 - 2 (1-p0)^{floor(tau_m / 2 t0) + 1} / (2 - p0)`.
pub fn cutoff_avg_ps_discrete(p0: f64, tau_m_s: f64, t0_s: f64) -> Result<f64> {
    check_inputs(p0, tau_m_s, t0_s)?;
    if tau_m_s.is_infinite() {
        return Ok(1.0);
    }
    let m = (tau_m_s / (2.0 * t0_s)).floor();
    let pow = ((m + 1.0) * (-p0).ln_1p()).exp();
    Ok(1.0 - 2.0 * pow / (2.0 - p0))
}

/// Average swap success relative to its zero-wait value when the stored
/// excitation decays exponentially: `<exp(-n_dif r)>`, written out as
/// `p0/(2-p0) * (e^r + 1 - p0)/(e^r - 1 + p0)`.
pub fn exponential_avg_ps(p0: f64, r: f64) -> Result<f64> {
    expected_decay_factor(p0, r, 1)
}
