//! Waiting-time statistics for two links attempting entanglement generation
//! in parallel.
//!
//! Each link needs a geometric number of attempts at success probability
//! `p0`. The swap fires once both links are ready, so the earlier link idles
//! for `n_dif = |n1 - n2|` further attempts and its memory decays over
//! `n_dif * t0`. The expectations below are exact closed forms; the decay
//! expectation additionally has a numeric-sum partner in the test suite.

use crate::{Error, Result};

fn check_p0(p0: f64) -> Result<()> {
    if p0.is_finite() && p0 > 0.0 && p0 <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field: "p0",
            value: format!("{p0}"),
            allowed: "(0, 1]",
        })
    }
}

/// Probability that a single link first succeeds on attempt `n` (n >= 1).
pub fn geometric_pmf(n: u64, p0: f64) -> Result<f64> {
    check_p0(p0)?;
    if n < 1 {
        return Err(Error::InvalidParameter {
            field: "n",
            value: format!("{n}"),
            allowed: "integers >= 1",
        });
    }
    if n == 1 {
        // avoids 0 * ln(0) = NaN at p0 = 1
        return Ok(p0);
    }
    // (1-p0)^(n-1) in log domain; exact at p0=1 since ln_1p(-1) = -inf
    Ok(p0 * (((n - 1) as f64) * (-p0).ln_1p()).exp())
}

/// Probability that the two links' attempt counts differ by exactly `n_dif`.
/// Negative differences are unrepresentable by the argument type.
pub fn ndif_pmf(n_dif: u64, p0: f64) -> Result<f64> {
    check_p0(p0)?;
    let base = p0 / (2.0 - p0);
    if n_dif == 0 {
        Ok(base)
    } else {
        Ok(2.0 * base * ((n_dif as f64) * (-p0).ln_1p()).exp())
    }
}

/// Expected attempt counts for a pair of links generating in parallel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkStatistics {
    pub p0: f64,
    /// Expected attempts until the later link succeeds.
    pub exp_n_max: f64,
    /// Expected attempts until the earlier link succeeds.
    pub exp_n_min: f64,
    /// Expected idle attempts of the earlier link.
    pub exp_n_dif: f64,
}

impl LinkStatistics {
    /// Expected decay factor `<exp(-multiplicity * n_dif * r)>` for this p0.
    pub fn decay_factor(&self, r: f64, multiplicity: u32) -> Result<f64> {
        expected_decay_factor(self.p0, r, multiplicity)
    }
}

/// Closed-form expectations of `n_max`, `n_min`, `n_dif`.
///
/// `exp_n_max` is computed as the sum of the other two, so the identity
/// `exp_n_max = exp_n_min + exp_n_dif` holds bit-exactly.
pub fn attempt_expectations(p0: f64) -> Result<LinkStatistics> {
    check_p0(p0)?;
    let denom = (2.0 - p0) * p0;
    let exp_n_min = 1.0 / denom;
    let exp_n_dif = (2.0 - 2.0 * p0) / denom;
    Ok(LinkStatistics {
        p0,
        exp_n_max: exp_n_min + exp_n_dif,
        exp_n_min,
        exp_n_dif,
    })
}

/// Expectation of `exp(-multiplicity * n_dif * r)` over the `n_dif`
/// distribution, in closed form:
///
/// ```text
/// p0/(2-p0) * (e^{mr} + 1 - p0) / (e^{mr} - 1 + p0)
/// ```
///
/// `multiplicity` counts how many stored excitations decay during the wait
/// (1 for the shared excitation of a single-photon-swap link, 2 when both
/// memories of a link hold a photon). Exactly 1 when `r = 0` (no decay) or
/// `p0 = 1` (never a wait).
pub fn expected_decay_factor(p0: f64, r: f64, multiplicity: u32) -> Result<f64> {
    check_p0(p0)?;
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "r",
            value: format!("{r}"),
            allowed: "[0, inf)",
        });
    }
    if multiplicity != 1 && multiplicity != 2 {
        return Err(Error::InvalidParameter {
            field: "multiplicity",
            value: format!("{multiplicity}"),
            allowed: "1 or 2",
        });
    }
    if r == 0.0 || p0 == 1.0 {
        return Ok(1.0);
    }
    // q = (1-p0) e^{-mr} < 1; the closed form rewritten in q avoids
    // overflowing e^{mr} and degrades gracefully to pmf(0) as q -> 0.
    let q = (1.0 - p0) * (-(multiplicity as f64) * r).exp();
    Ok(p0 / (2.0 - p0) * (1.0 + q) / (1.0 - q))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct truncated sum of `ndif_pmf(k) * exp(-m k r)`, stopping once the
    /// remaining pmf mass drops below 1e-13. Independent route kept as the
    /// oracle for the closed form.
    fn decay_factor_by_sum(p0: f64, r: f64, m: u32) -> f64 {
        let mut total = ndif_pmf(0, p0).unwrap();
        let mut k = 1u64;
        loop {
            // mass of the tail strictly above k-1
            let tail = 2.0 * (1.0 - p0).powi(k as i32) / (2.0 - p0);
            if tail < 1e-13 {
                break;
            }
            total += ndif_pmf(k, p0).unwrap() * (-(m as f64) * (k as f64) * r).exp();
            k += 1;
        }
        total
    }

    /// Brute-force enumeration over the joint (n1, n2) geometric grid with
    /// tail mass below 1e-13 per axis.
    fn enumerate_expectations(p0: f64) -> (f64, f64, f64) {
        let n_cap = if p0 == 1.0 {
            1
        } else {
            ((-13.0f64 * std::f64::consts::LN_10) / (1.0 - p0).ln()).ceil() as u64 + 1
        };
        let (mut e_max, mut e_min, mut e_dif) = (0.0f64, 0.0, 0.0);
        for n1 in 1..=n_cap {
            let w1 = geometric_pmf(n1, p0).unwrap();
            for n2 in 1..=n_cap {
                let w = w1 * geometric_pmf(n2, p0).unwrap();
                e_max += w * n1.max(n2) as f64;
                e_min += w * n1.min(n2) as f64;
                e_dif += w * n1.abs_diff(n2) as f64;
            }
        }
        (e_max, e_min, e_dif)
    }

    #[test]
    fn geometric_pmf_basics() {
        assert_eq!(geometric_pmf(1, 1.0).unwrap(), 1.0);
        assert_eq!(geometric_pmf(2, 0.5).unwrap(), 0.25);
        assert!(geometric_pmf(0, 0.5).is_err());
        assert!(geometric_pmf(1, 0.0).is_err());
        assert!(geometric_pmf(1, 1.5).is_err());
    }

    #[test]
    fn geometric_pmf_normalizes() {
        for &p0 in &[0.01f64, 0.1, 0.5, 0.9] {
            let n_cap = ((-13.0f64 * std::f64::consts::LN_10) / (1.0 - p0).ln()).ceil() as u64;
            let total: f64 = (1..=n_cap).map(|n| geometric_pmf(n, p0).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-12, "p0={p0} total={total}");
        }
    }

    #[test]
    fn ndif_pmf_matches_enumeration_at_half() {
        // brute force over the joint grid gives 1/3 for both n_dif=0 and 1
        let p0 = 0.5;
        let mut by_dif = [0.0f64; 4];
        for n1 in 1..=50u64 {
            for n2 in 1..=50u64 {
                let w = geometric_pmf(n1, p0).unwrap() * geometric_pmf(n2, p0).unwrap();
                let d = n1.abs_diff(n2) as usize;
                if d < by_dif.len() {
                    by_dif[d] += w;
                }
            }
        }
        assert!((by_dif[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((by_dif[1] - 1.0 / 3.0).abs() < 1e-12);
        assert!((ndif_pmf(0, p0).unwrap() - by_dif[0]).abs() < 1e-12);
        assert!((ndif_pmf(1, p0).unwrap() - by_dif[1]).abs() < 1e-12);
        assert!((ndif_pmf(2, p0).unwrap() - by_dif[2]).abs() < 1e-12);
        assert_eq!(ndif_pmf(0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn ndif_pmf_normalizes() {
        for &p0 in &[0.01f64, 0.1, 0.5, 0.9] {
            let k_cap = ((-13.0f64 * std::f64::consts::LN_10) / (1.0 - p0).ln()).ceil() as u64;
            let total: f64 = (0..=k_cap).map(|k| ndif_pmf(k, p0).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-12, "p0={p0} total={total}");
        }
    }

    #[test]
    fn expectations_match_enumeration() {
        for &p0 in &[0.1, 0.5, 0.9] {
            let s = attempt_expectations(p0).unwrap();
            let (e_max, e_min, e_dif) = enumerate_expectations(p0);
            assert!((s.exp_n_max / e_max - 1.0).abs() < 1e-9, "p0={p0}");
            assert!((s.exp_n_min / e_min - 1.0).abs() < 1e-9, "p0={p0}");
            assert!((s.exp_n_dif / e_dif - 1.0).abs() < 1e-9, "p0={p0}");
        }
        let s = attempt_expectations(0.5).unwrap();
        assert!((s.exp_n_max - 2.6667).abs() < 1e-4);
        assert!((s.exp_n_min - 1.3333).abs() < 1e-4);
        assert!((s.exp_n_dif - 1.3333).abs() < 1e-4);
    }

    #[test]
    fn deterministic_limit() {
        let s = attempt_expectations(1.0).unwrap();
        assert_eq!((s.exp_n_max, s.exp_n_min, s.exp_n_dif), (1.0, 1.0, 0.0));
    }

    #[test]
    fn max_identity_is_bit_exact() {
        let mut p0 = 1e-6;
        while p0 <= 1.0 {
            let s = attempt_expectations(p0).unwrap();
            assert_eq!(s.exp_n_max, s.exp_n_min + s.exp_n_dif, "p0={p0}");
            p0 *= 3.7;
        }
    }

    #[test]
    fn decay_factor_closed_form_matches_sum() {
        for &p0 in &[1e-4, 1e-2, 0.1, 0.5, 0.9, 1.0] {
            for &r in &[1e-4, 1e-2, 0.1, 1.0, 10.0] {
                for m in [1u32, 2] {
                    let closed = expected_decay_factor(p0, r, m).unwrap();
                    let sum = decay_factor_by_sum(p0, r, m);
                    assert!(
                        (closed - sum).abs() < 1e-12,
                        "p0={p0} r={r} m={m}: {closed} vs {sum}"
                    );
                }
            }
        }
    }

    #[test]
    fn decay_factor_edge_values() {
        assert_eq!(expected_decay_factor(0.3, 0.0, 2).unwrap(), 1.0);
        assert_eq!(expected_decay_factor(1.0, 5.0, 1).unwrap(), 1.0);
        let d = expected_decay_factor(0.1, 1.0, 1).unwrap();
        assert!((d - 0.10474).abs() < 1e-5, "{d}");
        // huge r: only the n_dif=0 term survives
        let d = expected_decay_factor(0.1, 1e6, 1).unwrap();
        assert!((d - 0.1 / 1.9).abs() < 1e-15);
        assert!(expected_decay_factor(0.1, -1.0, 1).is_err());
        assert!(expected_decay_factor(0.1, 1.0, 3).is_err());
    }

    #[test]
    fn link_statistics_decay_delegates() {
        let s = attempt_expectations(0.2).unwrap();
        assert_eq!(
            s.decay_factor(0.5, 2).unwrap(),
            expected_decay_factor(0.2, 0.5, 2).unwrap()
        );
    }
}
