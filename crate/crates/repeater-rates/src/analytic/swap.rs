//! Swap outcomes at the midpoint node and their averages over the waiting
//! link's memory decay.
//!
//! A link that waited `n_dif` attempts contributes a decayed fidelity
//! `alpha0 * exp(-n_dif * r)` (single stored excitation) or decays both of
//! its memories (`2 n_dif r` in the exponent) when each end stores a photon.

use crate::model::{Scheme, SchemeParams};
use crate::{Error, Result};

use super::waiting::{expected_decay_factor, ndif_pmf};

/// Post-swap state quality and success probability for one attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapOutcome {
    /// Weight of the entangled component in the heralded state.
    pub alpha: f64,
    /// Probability the measurement heralds success.
    pub p_s: f64,
}

fn check_fidelity(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            value: format!("{v}"),
            allowed: "[0, 1]",
        })
    }
}

/// Single-photon interference swap of two stored states with entangled
/// weights `alpha1`, `alpha2`, detected at efficiency `eta_d`.
///
/// Both inputs entirely vacuum is rejected: a click can then only come from
/// noise, and the heralded state is undefined.
pub fn swap_single_photon(alpha1: f64, alpha2: f64, eta_d: f64) -> Result<SwapOutcome> {
    check_fidelity("alpha1", alpha1)?;
    check_fidelity("alpha2", alpha2)?;
    check_fidelity("eta_d", eta_d)?;
    if alpha1 == 0.0 && alpha2 == 0.0 {
        return Err(Error::DegenerateSwap);
    }
    let denom = alpha1 + alpha2 - alpha1 * alpha2 * eta_d;
    Ok(SwapOutcome {
        alpha: alpha1 * alpha2 / denom,
        p_s: eta_d * denom / 2.0,
    })
}

/// Two-photon coincidence swap. Success projects out the vacuum components,
/// so the heralded state is pure (`alpha = 1`) regardless of the inputs.
pub fn swap_two_photon(alpha1: f64, alpha2: f64, eta_d: f64) -> Result<SwapOutcome> {
    check_fidelity("alpha1", alpha1)?;
    check_fidelity("alpha2", alpha2)?;
    check_fidelity("eta_d", eta_d)?;
    Ok(SwapOutcome {
        alpha: 1.0,
        p_s: alpha1 * alpha2 * eta_d * eta_d / 2.0,
    })
}

/// Per-attempt generation probability and fresh-state fidelity of one
/// elementary link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationOutcome {
    pub p0: f64,
    pub alpha0: f64,
}

/// Generation success probability `p0` and fresh fidelity `alpha0` for the
/// scheme's source arrangement at the link length implied by the parameters.
pub fn generation(params: &SchemeParams) -> Result<GenerationOutcome> {
    let eta_t = params.geometry().eta_t;
    let (eta_s, eta_d, eta_m) = (params.eta_s(), params.eta_d(), params.eta_m());
    let (p0, alpha0) = match params.scheme() {
        Scheme::SpsSingle => {
            // builder guarantees gamma's presence for this scheme
            let gamma = params.gamma().expect("validated params carry gamma");
            (2.0 * gamma * eta_t * eta_s * eta_d, eta_m * (1.0 - gamma))
        }
        Scheme::NdppsSingle => (2.0 * eta_t * eta_s * eta_d, eta_m),
        Scheme::DppsDouble | Scheme::NdppsDouble => {
            let t = eta_t * eta_s * eta_d;
            (t * t / 2.0, eta_m * eta_m)
        }
    };
    if p0 > 1.0 {
        return Err(Error::InvalidParameter {
            field: "derived_p0",
            value: format!("{p0}"),
            allowed: "(0, 1]; lower gamma or the efficiencies",
        });
    }
    Ok(GenerationOutcome { p0, alpha0 })
}

/// Decay-averaged single-photon swap outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvgSingleSwap {
    /// Mean post-swap fidelity over the waiting-time distribution
    /// (unconditional on the heralding outcome).
    pub avg_alpha1: f64,
    /// Mean heralding probability over the waiting-time distribution.
    pub avg_ps1: f64,
}

fn check_swap_inputs(p0: f64, alpha0: f64, eta_d: f64, r: f64) -> Result<()> {
    for (field, v) in [("p0", p0), ("alpha0", alpha0), ("eta_d", eta_d)] {
        if !(v.is_finite() && v > 0.0 && v <= 1.0) {
            return Err(Error::InvalidParameter {
                field,
                value: format!("{v}"),
                allowed: "(0, 1]",
            });
        }
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "r",
            value: format!("{r}"),
            allowed: "[0, inf)",
        });
    }
    Ok(())
}

/// Averages the single-photon swap over the waiting time: the late link is
/// fresh at `alpha0`, the early one decayed to `alpha0 * exp(-n_dif * r)`.
///
/// The success probability has a closed form through the decay expectation.
/// The fidelity average does not (the swap is a ratio in the decayed
/// fidelity), so it is summed numerically; the truncation bound keeps the
/// neglected remainder below 1e-12 of the result.
pub fn avg_swap_single(p0: f64, alpha0: f64, eta_d: f64, r: f64) -> Result<AvgSingleSwap> {
    check_swap_inputs(p0, alpha0, eta_d, r)?;
    let c = 1.0 - alpha0 * eta_d;
    let d1 = expected_decay_factor(p0, r, 1)?;
    let avg_ps1 = alpha0 * eta_d / 2.0 * (1.0 + c * d1);

    if r == 0.0 || p0 == 1.0 {
        // no decay spread: every attempt sees two fresh states
        return Ok(AvgSingleSwap {
            avg_alpha1: alpha0 / (2.0 - alpha0 * eta_d),
            avg_ps1,
        });
    }

    // sum_k pmf(k) * alpha0 e^{-kr} / (1 + c e^{-kr}), with Kahan
    // compensation; terms fall off like q^k for q = (1-p0) e^{-r}.
    let one_minus_p0 = 1.0 - p0;
    let step = (-r).exp();
    let q = one_minus_p0 * step;
    let mut sum = ndif_pmf(0, p0)? * alpha0 / (1.0 + c);
    let mut comp = 0.0f64;
    let mut weight = 2.0 * p0 / (2.0 - p0) * one_minus_p0; // pmf(k) for k=1
    let mut decay = step; // e^{-kr}
    loop {
        // everything still ahead is below weight*decay*alpha0/(1-q)
        let tail_bound = weight * decay * alpha0 / (1.0 - q);
        if !(tail_bound > sum * 1e-13) {
            break;
        }
        let term = weight * alpha0 * decay / (1.0 + c * decay);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        weight *= one_minus_p0;
        decay *= step;
    }
    Ok(AvgSingleSwap {
        avg_alpha1: sum,
        avg_ps1,
    })
}

/// Decay-averaged two-photon swap success probability. Both memories of the
/// early link decay during the wait, hence multiplicity 2 in the decay
/// expectation.
pub fn avg_swap_two_photon(p0: f64, alpha0: f64, eta_d: f64, r: f64) -> Result<f64> {
    check_swap_inputs(p0, alpha0, eta_d, r)?;
    let d2 = expected_decay_factor(p0, r, 2)?;
    Ok(eta_d * eta_d * alpha0 * alpha0 * d2 / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scheme;
    use proptest::prelude::*;

    fn avg_alpha_by_plain_sum(p0: f64, alpha0: f64, eta_d: f64, r: f64) -> f64 {
        let c = 1.0 - alpha0 * eta_d;
        let mut total = 0.0;
        let mut k = 0u64;
        loop {
            let tail = if k == 0 {
                1.0
            } else {
                2.0 * (1.0 - p0).powi(k as i32) / (2.0 - p0)
            };
            if tail < 1e-14 {
                break;
            }
            let e = (-(k as f64) * r).exp();
            total += ndif_pmf(k, p0).unwrap() * alpha0 * e / (1.0 + c * e);
            k += 1;
        }
        total
    }

    #[test]
    fn single_photon_swap_examples() {
        let s = swap_single_photon(1.0, 1.0, 1.0).unwrap();
        assert_eq!(s.alpha, 1.0);
        assert_eq!(s.p_s, 0.5);

        let s = swap_single_photon(0.8, 0.8, 0.95).unwrap();
        assert!((s.alpha - 0.64516).abs() < 1e-5, "{}", s.alpha);
        assert!((s.p_s - 0.47120).abs() < 1e-5, "{}", s.p_s);

        // one vacuum link: heralding can still fire off the live link
        let s = swap_single_photon(0.6, 0.0, 0.9).unwrap();
        assert!((s.p_s - 0.6 * 0.9 / 2.0).abs() < 1e-15);
        assert_eq!(s.alpha, 0.0);

        assert!(matches!(
            swap_single_photon(0.0, 0.0, 0.9),
            Err(Error::DegenerateSwap)
        ));
        assert!(swap_single_photon(1.2, 0.5, 0.9).is_err());
    }

    #[test]
    fn two_photon_swap_examples() {
        assert_eq!(swap_two_photon(1.0, 1.0, 1.0).unwrap().p_s, 0.5);
        let s = swap_two_photon(0.8, 0.8, 0.95).unwrap();
        assert!((s.p_s - 0.28880).abs() < 1e-5, "{}", s.p_s);
        assert_eq!(s.alpha, 1.0);
        assert_eq!(swap_two_photon(0.7, 0.0, 0.95).unwrap().p_s, 0.0);
    }

    proptest! {
        #[test]
        fn swap_outcomes_stay_in_unit_cube(
            a1 in 0.0f64..=1.0,
            a2 in 0.0f64..=1.0,
            ed in 0.0f64..=1.0,
        ) {
            if let Ok(s) = swap_single_photon(a1, a2, ed) {
                prop_assert!((0.0..=1.0).contains(&s.alpha), "alpha={}", s.alpha);
                prop_assert!((0.0..=1.0).contains(&s.p_s), "p_s={}", s.p_s);
            }
            let t = swap_two_photon(a1, a2, ed).unwrap();
            prop_assert!(t.alpha == 1.0);
            prop_assert!((0.0..=1.0).contains(&t.p_s));
        }
    }

    #[test]
    fn generation_two_photon_value() {
        // 100 km total -> 50 km links
        let p = SchemeParams::builder(Scheme::DppsDouble, 100_000.0)
            .eta_s(0.5)
            .eta_d(0.95)
            .build()
            .unwrap();
        let g = generation(&p).unwrap();
        let eta_t = (-50.0f64 / 22.0).exp();
        let expect = (eta_t * 0.5 * 0.95).powi(2) / 2.0;
        assert!((g.p0 - expect).abs() < 1e-18);
        assert!((g.p0 - 1.199e-3).abs() < 3e-6, "{}", g.p0);
        assert_eq!(g.alpha0, 1.0);
    }

    #[test]
    fn generation_single_photon_value() {
        let p = SchemeParams::builder(Scheme::SpsSingle, 100_000.0)
            .gamma(0.2)
            .eta_s(0.75)
            .eta_d(0.95)
            .num_links(2)
            .build()
            .unwrap();
        let g = generation(&p).unwrap();
        assert!((g.p0 - 2.938e-2).abs() < 5e-5, "{}", g.p0);
        // eta_m = 1 default
        assert!((g.alpha0 - 0.8).abs() < 1e-15);
    }

    #[test]
    fn generation_rejects_probability_overflow() {
        // short link, bright source: 2 gamma eta_t eta_s eta_d > 1
        let p = SchemeParams::builder(Scheme::SpsSingle, 100.0)
            .gamma(0.9)
            .build()
            .unwrap();
        let err = generation(&p).unwrap_err();
        assert!(err.to_string().contains("derived_p0"), "{err}");
    }

    #[test]
    fn avg_single_no_decay_limits() {
        let a = avg_swap_single(0.3, 0.8, 0.95, 0.0).unwrap();
        assert!((a.avg_alpha1 - 0.8 / (2.0 - 0.8 * 0.95)).abs() < 1e-15);
        assert!((a.avg_ps1 - 0.8 * 0.95 * (2.0 - 0.8 * 0.95) / 2.0).abs() < 1e-15);
        assert!((a.avg_ps1 - 0.47120).abs() < 1e-5);
    }

    #[test]
    fn avg_single_matches_plain_sum() {
        for &p0 in &[0.01, 0.1, 0.5, 0.9] {
            for &r in &[0.01, 0.3, 2.0] {
                for &(a0, ed) in &[(0.9, 0.95), (0.5, 0.8), (0.1, 1.0)] {
                    let got = avg_swap_single(p0, a0, ed, r).unwrap();
                    let want_alpha = avg_alpha_by_plain_sum(p0, a0, ed, r);
                    assert!(
                        (got.avg_alpha1 - want_alpha).abs() < 1e-12,
                        "p0={p0} r={r} a0={a0}: {} vs {want_alpha}",
                        got.avg_alpha1
                    );
                    // closed-form ps against its own series
                    let c = 1.0 - a0 * ed;
                    let mut ps_sum = 0.0;
                    for k in 0..5000u64 {
                        let e = (-(k as f64) * r).exp();
                        ps_sum += ndif_pmf(k, p0).unwrap() * a0 * ed / 2.0 * (1.0 + c * e);
                    }
                    assert!((got.avg_ps1 - ps_sum).abs() < 1e-12, "p0={p0} r={r}");
                }
            }
        }
    }

    #[test]
    fn avg_single_survives_tiny_p0() {
        let a = avg_swap_single(1e-8, 0.7, 0.95, 0.05).unwrap();
        assert!(a.avg_alpha1 > 0.0 && a.avg_alpha1 < 0.7);
        assert!(a.avg_ps1 > 0.0 && a.avg_ps1 < 0.5);
    }

    #[test]
    fn avg_two_photon_values() {
        assert!((avg_swap_two_photon(0.3, 1.0, 1.0, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((avg_swap_two_photon(0.3, 1.0, 0.95, 0.0).unwrap() - 0.45125).abs() < 1e-15);
        let got = avg_swap_two_photon(0.1, 1.0, 1.0, 1.0).unwrap();
        let want = 0.5 * expected_decay_factor(0.1, 1.0, 2).unwrap();
        assert!((got - want).abs() < 1e-15);
    }
}
