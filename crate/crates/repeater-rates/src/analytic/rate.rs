//! Entanglement-distribution time (EDT) and delivered rate.
//!
//! Two chain shapes exist. The plain two-link chain swaps once in the middle
//! and is done. The postselected arrangement runs two such chains in parallel
//! between the same end nodes and converts their Fock-space entanglement into
//! a usable pair by interfering the ends; its effective per-step success is
//! folded into a geometric model with probability `p0' = 2 p0 <p_s> / 3`.

use crate::model::{BsmKind, SchemeParams};
use crate::{Error, Result};

use super::swap::{avg_swap_single, avg_swap_two_photon, generation};
use super::waiting::{attempt_expectations, expected_decay_factor};

/// Which approximation produced the midpoint EDT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaAssumption {
    /// Waiting time and swap success treated as uncorrelated (their
    /// correlation ratio is ~1 for single-photon swaps); the EDT is exact in
    /// expectation and all three bounds coincide.
    BetaNearOne,
    /// Midpoint of the provable lower/upper bounds; used where the
    /// correlation is strong (two-photon swaps, postselection).
    BoundsMidpoint,
}

impl std::fmt::Display for BetaAssumption {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BetaAssumption::BetaNearOne => "beta~1",
            BetaAssumption::BoundsMidpoint => "bounds-midpoint",
        })
    }
}

/// Delivered-entanglement timing for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub edt_lower_s: f64,
    pub edt_mid_s: f64,
    pub edt_upper_s: f64,
    /// `1 / edt_mid_s`.
    pub rate_hz: f64,
    /// Fidelity of the delivered state (1 when a success projects out the
    /// vacuum component).
    pub final_alpha: f64,
    pub beta_assumption: BetaAssumption,
}

impl RateResult {
    fn checked(
        lower: f64,
        mid: f64,
        upper: f64,
        final_alpha: f64,
        beta_assumption: BetaAssumption,
    ) -> Result<RateResult> {
        let all_ok = [lower, mid, upper].iter().all(|v| v.is_finite() && *v > 0.0);
        if !all_ok {
            return Err(Error::RateUnderflow);
        }
        debug_assert!(lower <= mid && mid <= upper);
        Ok(RateResult {
            edt_lower_s: lower,
            edt_mid_s: mid,
            edt_upper_s: upper,
            rate_hz: 1.0 / mid,
            final_alpha,
            beta_assumption,
        })
    }
}

/// EDT of the plain two-link chain (`num_links = 2`).
///
/// Single-photon swap: the waiting time barely correlates with the swap
/// outcome, so `EDT = <n_max> T0 / <p_s>` holds exactly in expectation and is
/// reported in all three bound fields. Two-photon swap: the correlation is
/// strong; provable bounds use `<n_min>` and `<n_max>`, and the midpoint
/// estimate `T0 / (p0 <p_s>)` sits between them.
pub fn edt_two_link(params: &SchemeParams) -> Result<RateResult> {
    if params.num_links() != 2 {
        return Err(Error::TopologyMismatch {
            context: format!(
                "two-link EDT requires num_links = 2, got {}",
                params.num_links()
            ),
        });
    }
    let gen = generation(params)?;
    if gen.p0 == 0.0 {
        return Err(Error::RateUnderflow);
    }
    let geom = params.geometry();
    let stats = attempt_expectations(gen.p0)?;
    match params.scheme().bsm() {
        BsmKind::SinglePhoton => {
            let avg = avg_swap_single(gen.p0, gen.alpha0, params.eta_d(), geom.r)?;
            let edt = stats.exp_n_max * geom.t0_s / avg.avg_ps1;
            RateResult::checked(edt, edt, edt, avg.avg_alpha1, BetaAssumption::BetaNearOne)
        }
        BsmKind::TwoPhoton => {
            let ps = avg_swap_two_photon(gen.p0, gen.alpha0, params.eta_d(), geom.r)?;
            let lower = stats.exp_n_min * geom.t0_s / ps;
            let upper = stats.exp_n_max * geom.t0_s / ps;
            let mid = geom.t0_s / (gen.p0 * ps);
            RateResult::checked(lower, mid, upper, 1.0, BetaAssumption::BoundsMidpoint)
        }
    }
}

/// EDT of the postselected double chain (`num_links = 4`).
///
/// Each two-link chain re-establishes itself in a geometric number of steps
/// at `p0' = 2 p0 <p_s> / 3`; the end-node interference succeeds with
/// probability `alpha1 * alpha2 * exp(-T_dif / tau_m)`, approximated here by
/// `<alpha>^2 <exp(-T_dif r)>` with the unconditional mean fidelity.
pub fn edt_postselected(params: &SchemeParams) -> Result<RateResult> {
    if params.scheme().bsm() != BsmKind::SinglePhoton {
        return Err(Error::SchemeMismatch {
            context: format!(
                "postselected EDT applies to single-photon-swap schemes, got \"{}\"",
                params.scheme()
            ),
        });
    }
    if params.num_links() != 4 {
        return Err(Error::TopologyMismatch {
            context: format!(
                "postselected EDT requires num_links = 4, got {}",
                params.num_links()
            ),
        });
    }
    let gen = generation(params)?;
    if gen.p0 == 0.0 {
        return Err(Error::RateUnderflow);
    }
    let geom = params.geometry();
    let avg = avg_swap_single(gen.p0, gen.alpha0, params.eta_d(), geom.r)?;
    let p0_eff = 2.0 * gen.p0 * avg.avg_ps1 / 3.0;
    let chain = attempt_expectations(p0_eff)?;
    let t_max = chain.exp_n_max * geom.t0_s;
    let t_min = chain.exp_n_min * geom.t0_s;
    let decay = expected_decay_factor(p0_eff, geom.r, 1)?;
    let denom = avg.avg_alpha1 * avg.avg_alpha1 * decay;
    RateResult::checked(
        t_min / denom,
        (t_max + t_min) / (2.0 * denom),
        t_max / denom,
        1.0,
        BetaAssumption::BoundsMidpoint,
    )
}

/// Delivered rate for the parameter set's own topology: the two-link chain
/// for `num_links = 2`, the postselected double chain for `num_links = 4`.
pub fn delivered_rate(params: &SchemeParams) -> Result<RateResult> {
    match params.num_links() {
        2 => edt_two_link(params),
        4 => edt_postselected(params),
        n => Err(Error::TopologyMismatch {
            context: format!("no rate model for num_links = {n}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scheme;

    /// Link length tuned so eta_t = 1/2 and p0 = 1 with unit efficiencies.
    fn p0_one_single_photon() -> SchemeParams {
        let total = 2.0 * 22_000.0 * std::f64::consts::LN_2;
        SchemeParams::builder(Scheme::NdppsSingle, total)
            .num_links(2)
            .build()
            .unwrap()
    }

    #[test]
    fn deterministic_generation_gives_two_t0() {
        let p = p0_one_single_photon();
        let geom = p.geometry();
        let res = edt_two_link(&p).unwrap();
        assert!((res.edt_mid_s - 2.0 * geom.t0_s).abs() < 1e-15 * geom.t0_s);
        assert_eq!(res.edt_lower_s, res.edt_mid_s);
        assert_eq!(res.edt_upper_s, res.edt_mid_s);
        assert_eq!(res.beta_assumption, BetaAssumption::BetaNearOne);
    }

    #[test]
    fn two_photon_reference_rate() {
        let p = SchemeParams::builder(Scheme::DppsDouble, 100_000.0)
            .eta_s(0.5)
            .eta_d(0.95)
            .build()
            .unwrap();
        let res = edt_two_link(&p).unwrap();
        assert!((res.rate_hz - 2.16).abs() < 0.01, "{}", res.rate_hz);
        assert!(res.edt_lower_s <= res.edt_mid_s && res.edt_mid_s <= res.edt_upper_s);
        assert_eq!(res.final_alpha, 1.0);
        assert_eq!(res.beta_assumption, BetaAssumption::BoundsMidpoint);
        assert!((res.rate_hz * res.edt_mid_s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_photon_bounds_ordering_across_p0_range() {
        for km in [10.0, 50.0, 100.0, 150.0, 200.0] {
            let p = SchemeParams::builder(Scheme::DppsDouble, km * 1000.0)
                .eta_s(0.5)
                .eta_d(0.95)
                .eta_m(0.7)
                .tau_m_s(1e-3)
                .build()
                .unwrap();
            let res = edt_two_link(&p).unwrap();
            assert!(
                res.edt_lower_s <= res.edt_mid_s && res.edt_mid_s <= res.edt_upper_s,
                "{km} km"
            );
        }
    }

    #[test]
    fn postselected_no_decay_midpoint() {
        // alpha0 = eta_d = 1 makes <alpha> = 1; infinite lifetime kills decay
        let p = SchemeParams::builder(Scheme::NdppsSingle, 100_000.0)
            .eta_s(0.5)
            .build()
            .unwrap();
        let res = edt_postselected(&p).unwrap();
        let gen = generation(&p).unwrap();
        let ps = avg_swap_single(gen.p0, 1.0, 1.0, 0.0).unwrap().avg_ps1;
        let chain = attempt_expectations(2.0 * gen.p0 * ps / 3.0).unwrap();
        let t0 = p.geometry().t0_s;
        let want = (chain.exp_n_max + chain.exp_n_min) * t0 / 2.0;
        assert!((res.edt_mid_s - want).abs() < 1e-12 * want);
        assert_eq!(res.final_alpha, 1.0);
    }

    #[test]
    fn postselected_order_ten_hz_at_hundred_km() {
        let p = SchemeParams::builder(Scheme::SpsSingle, 100_000.0)
            .gamma(0.2)
            .eta_s(0.75)
            .eta_d(0.95)
            .build()
            .unwrap();
        let res = delivered_rate(&p).unwrap();
        assert!(
            res.rate_hz > 1.0 && res.rate_hz < 100.0,
            "expected order 10 Hz, got {}",
            res.rate_hz
        );
    }

    #[test]
    fn topology_and_scheme_mismatches() {
        let two_photon = SchemeParams::builder(Scheme::DppsDouble, 1e5).build().unwrap();
        assert!(matches!(
            edt_postselected(&two_photon),
            Err(Error::SchemeMismatch { .. })
        ));
        let four_link = SchemeParams::builder(Scheme::NdppsSingle, 1e5).build().unwrap();
        assert_eq!(four_link.num_links(), 4);
        assert!(matches!(
            edt_two_link(&four_link),
            Err(Error::TopologyMismatch { .. })
        ));
    }

    #[test]
    fn absurd_distance_underflows() {
        let p = SchemeParams::builder(Scheme::DppsDouble, 1e12).build().unwrap();
        assert!(matches!(edt_two_link(&p), Err(Error::RateUnderflow)));
    }

    #[test]
    fn edt_monotone_in_each_knob() {
        let mk = |km: f64, eta_m: f64, eta_d: f64, tau: f64| {
            let p = SchemeParams::builder(Scheme::DppsDouble, km * 1e3)
                .eta_s(0.5)
                .eta_d(eta_d)
                .eta_m(eta_m)
                .tau_m_s(tau)
                .build()
                .unwrap();
            edt_two_link(&p).unwrap().edt_mid_s
        };
        let base = mk(100.0, 0.7, 0.9, 1e-3);
        assert!(mk(100.0, 0.8, 0.9, 1e-3) < base);
        assert!(mk(100.0, 0.7, 0.95, 1e-3) < base);
        assert!(mk(100.0, 0.7, 0.9, 2e-3) < base);
        assert!(mk(120.0, 0.7, 0.9, 1e-3) > base);

        let mk_sp = |km: f64, eta_m: f64, tau: f64| {
            let p = SchemeParams::builder(Scheme::SpsSingle, km * 1e3)
                .gamma(0.2)
                .eta_s(0.75)
                .eta_d(0.95)
                .eta_m(eta_m)
                .tau_m_s(tau)
                .build()
                .unwrap();
            edt_postselected(&p).unwrap().edt_mid_s
        };
        let base = mk_sp(100.0, 0.7, 1e-3);
        assert!(mk_sp(100.0, 0.8, 1e-3) < base);
        assert!(mk_sp(100.0, 0.7, 2e-3) < base);
        assert!(mk_sp(120.0, 0.7, 1e-3) > base);
    }
}
