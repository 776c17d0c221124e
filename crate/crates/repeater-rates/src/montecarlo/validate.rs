//! Estimators that exist to check modeling assumptions: the waiting/swap
//! correlation ratio, the chain-difference distribution against its geometric
//! surrogate, and the memory-deadline versus exponential-decay comparison.

use std::collections::BTreeMap;

use crate::analytic::{
    attempt_expectations, avg_swap_single, cutoff_avg_ps, cutoff_avg_ps_discrete,
    expected_decay_factor, ndif_pmf,
};
use crate::model::{BsmKind, MemoryModel};
use crate::{Error, Result};

use super::estimator::{estimate_from_sums, run_chunked, Estimate, EstimatorReport, Kahan};
use super::postselect::run_chain;
use super::rng::{chunk_rng, sample_geometric};
use super::twolink::LinkModel;
use super::{keys, TRIAL_CHUNK};

/// Exact model value reported next to empirical estimates.
fn model_value(v: f64) -> Estimate {
    Estimate {
        mean: v,
        standard_error: 0.0,
        n_samples: 0,
    }
}

/// Point configuration for the correlation-ratio estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaConfig {
    pub bsm: BsmKind,
    pub p0: f64,
    /// Attempt time over memory lifetime.
    pub r: f64,
    pub alpha0: f64,
    pub eta_d: f64,
    pub n_samples: u64,
    pub master_seed: u64,
}

/// Number of contiguous batches behind the batch-means standard error.
const BETA_BATCHES: u64 = 20;

/// Estimates the correlation ratio `beta = <n_dif p_s> / (<n_dif> <p_s>)` by
/// sampling waiting-time pairs and evaluating the per-attempt heralding
/// probability analytically for each draw. The standard error comes from
/// the spread of 20 contiguous batch estimates, since beta is a ratio.
pub fn estimate_beta(config: &BetaConfig) -> Result<EstimatorReport> {
    if !(config.p0 > 0.0 && config.p0 < 1.0) {
        return Err(Error::InvalidParameter {
            field: "p0",
            value: format!("{}", config.p0),
            allowed: "(0, 1); the ratio is undefined when n_dif is identically 0",
        });
    }
    if config.n_samples < 20 * BETA_BATCHES {
        return Err(Error::InvalidParameter {
            field: "n_samples",
            value: format!("{}", config.n_samples),
            allowed: "at least 400",
        });
    }
    let c = 1.0 - config.alpha0 * config.eta_d;
    let ps_of = |n_dif: u64| -> f64 {
        let nd = n_dif as f64;
        match config.bsm {
            BsmKind::SinglePhoton => {
                config.alpha0 * config.eta_d / 2.0 * (1.0 + c * (-nd * config.r).exp())
            }
            BsmKind::TwoPhoton => {
                config.eta_d * config.eta_d * config.alpha0 * config.alpha0 / 2.0
                    * (-2.0 * nd * config.r).exp()
            }
        }
    };

    struct Batch {
        n: u64,
        sum_n: u128,
        sum_p: Kahan,
        sum_np: Kahan,
    }
    let per_batch = config.n_samples / BETA_BATCHES;
    let batches = run_chunked(BETA_BATCHES * per_batch, per_batch, |bi, _, count| {
        let mut rng = chunk_rng(config.master_seed, bi);
        let mut b = Batch {
            n: count,
            sum_n: 0,
            sum_p: Kahan::default(),
            sum_np: Kahan::default(),
        };
        for _ in 0..count {
            let n1 = sample_geometric(config.p0, &mut rng);
            let n2 = sample_geometric(config.p0, &mut rng);
            let nd = n1.abs_diff(n2);
            let p = ps_of(nd);
            b.sum_n += nd as u128;
            b.sum_p.add(p);
            b.sum_np.add(nd as f64 * p);
        }
        b
    });

    let beta_of = |b: &Batch| -> f64 {
        let n = b.n as f64;
        let mean_n = b.sum_n as f64 / n;
        let mean_p = b.sum_p.value() / n;
        (b.sum_np.value() / n) / (mean_n * mean_p)
    };
    let pooled = Batch {
        n: batches.iter().map(|b| b.n).sum(),
        sum_n: batches.iter().map(|b| b.sum_n).sum(),
        sum_p: {
            let mut k = Kahan::default();
            batches.iter().for_each(|b| k.add(b.sum_p.value()));
            k
        },
        sum_np: {
            let mut k = Kahan::default();
            batches.iter().for_each(|b| k.add(b.sum_np.value()));
            k
        },
    };
    let beta = beta_of(&pooled);
    let batch_betas: Vec<f64> = batches.iter().map(beta_of).collect();
    let bmean = batch_betas.iter().sum::<f64>() / batch_betas.len() as f64;
    let var = batch_betas.iter().map(|b| (b - bmean) * (b - bmean)).sum::<f64>()
        / (batch_betas.len() - 1) as f64;
    let se = (var / batch_betas.len() as f64).sqrt();

    let mut report = EstimatorReport::new();
    report.push(
        keys::BETA,
        Estimate {
            mean: beta,
            standard_error: se,
            n_samples: pooled.n,
        },
    );
    report.push(
        keys::N_DIF,
        model_value(pooled.sum_n as f64 / pooled.n as f64),
    );
    report.push(keys::MEAN_PS, model_value(pooled.sum_p.value() / pooled.n as f64));
    Ok(report)
}

/// Configuration for the chain-difference distribution check.
#[derive(Debug, Clone, PartialEq)]
pub struct TdifConfig {
    /// Elementary-link model; must be single-photon-swap.
    pub link: LinkModel,
    pub n_trials: u64,
    pub master_seed: u64,
    /// Swap-attempt budget per chain.
    pub max_attempts_per_chain: u64,
}

/// Simulates pairs of independent two-link chains, builds the empirical pmf
/// of their completion-time difference (units of t0), and compares it to the
/// geometric-difference model at the effective step probability
/// `p0' = 2 p0 <p_s> / 3`. Reports the total-variation distance and the
/// completion-time means next to the model's predictions.
pub fn validate_tdif_distribution(config: &TdifConfig) -> Result<EstimatorReport> {
    if config.link.bsm != BsmKind::SinglePhoton {
        return Err(Error::SchemeMismatch {
            context: "chain-difference validation requires a single-photon-swap link".to_string(),
        });
    }
    config.link.validate()?;
    let link = &config.link;

    #[derive(Default)]
    struct Agg {
        trials_ok: u64,
        truncated: u64,
        counts: BTreeMap<u64, u64>,
        sum_tmin: u128,
        sum_tmin_sq: Kahan,
        sum_tmax: u128,
        sum_tmax_sq: Kahan,
        sum_tdif: u128,
        sum_tdif_sq: Kahan,
    }
    let chunks = run_chunked(config.n_trials, TRIAL_CHUNK, |ci, _, count| {
        let mut rng = chunk_rng(config.master_seed, ci);
        let mut agg = Agg::default();
        for _ in 0..count {
            let mut budget = config.max_attempts_per_chain;
            let a = run_chain(link, &mut rng, &mut budget, None);
            let mut budget = config.max_attempts_per_chain;
            let b = run_chain(link, &mut rng, &mut budget, None);
            let (Some(a), Some(b)) = (a, b) else {
                agg.truncated += 1;
                continue;
            };
            let (tmin, tmax) = (a.units.min(b.units), a.units.max(b.units));
            let tdif = tmax - tmin;
            agg.trials_ok += 1;
            *agg.counts.entry(tdif).or_insert(0) += 1;
            agg.sum_tmin += tmin as u128;
            agg.sum_tmax += tmax as u128;
            agg.sum_tdif += tdif as u128;
            agg.sum_tmin_sq.add((tmin as f64) * (tmin as f64));
            agg.sum_tmax_sq.add((tmax as f64) * (tmax as f64));
            agg.sum_tdif_sq.add((tdif as f64) * (tdif as f64));
        }
        agg
    });
    let mut total = Agg::default();
    for c in chunks {
        total.trials_ok += c.trials_ok;
        total.truncated += c.truncated;
        for (k, v) in c.counts {
            *total.counts.entry(k).or_insert(0) += v;
        }
        total.sum_tmin += c.sum_tmin;
        total.sum_tmax += c.sum_tmax;
        total.sum_tdif += c.sum_tdif;
        total.sum_tmin_sq.add(c.sum_tmin_sq.value());
        total.sum_tmax_sq.add(c.sum_tmax_sq.value());
        total.sum_tdif_sq.add(c.sum_tdif_sq.value());
    }
    if total.trials_ok == 0 {
        return Err(Error::RateUnderflow);
    }

    // surrogate: both chain times geometric at p0', so their difference
    // follows the two-sided-geometric-difference pmf
    let avg = avg_swap_single(
        link.p0,
        link.alpha0,
        link.eta_d,
        memory_rate(link)?,
    )?;
    let p0_eff = 2.0 * link.p0 * avg.avg_ps1 / 3.0;
    let n_ok = total.trials_ok as f64;
    // model tail mass beyond k: 2 (1-p)^(k+1) / (2-p)
    let tail = |k: u64| 2.0 * ((k + 1) as f64 * (-p0_eff).ln_1p()).exp() / (2.0 - p0_eff);
    let max_emp = *total.counts.keys().next_back().unwrap();
    let mut tv = 0.0f64;
    let mut k = 0u64;
    while k <= max_emp || tail(k.saturating_sub(1)) > 1e-12 {
        let model = ndif_pmf(k, p0_eff)?;
        let emp = total.counts.get(&k).map_or(0.0, |&c| c as f64 / n_ok);
        tv += (model - emp).abs();
        k += 1;
    }
    tv = (tv + tail(k - 1)) / 2.0;

    let chain = attempt_expectations(p0_eff)?;
    let mut report = EstimatorReport::new();
    report.truncated_trials = total.truncated;
    report.push(
        keys::TV_DISTANCE,
        Estimate {
            mean: tv,
            standard_error: 0.0,
            n_samples: total.trials_ok,
        },
    );
    report.push(
        keys::T_MIN_UNITS,
        estimate_from_sums(total.sum_tmin as f64, total.sum_tmin_sq.value(), total.trials_ok),
    );
    report.push(
        keys::T_MAX_UNITS,
        estimate_from_sums(total.sum_tmax as f64, total.sum_tmax_sq.value(), total.trials_ok),
    );
    report.push(
        keys::T_DIF_UNITS,
        estimate_from_sums(total.sum_tdif as f64, total.sum_tdif_sq.value(), total.trials_ok),
    );
    report.push(keys::T_MIN_MODEL_UNITS, model_value(chain.exp_n_min));
    report.push(keys::T_MAX_MODEL_UNITS, model_value(chain.exp_n_max));
    report.histogram = Some(
        total
            .counts
            .iter()
            .map(|(&k, &c)| (k, c as f64 / n_ok))
            .collect(),
    );
    Ok(report)
}

/// The decay rate per unit of t0 implied by the link's memory model; the
/// surrogate model needs it in exponential form.
fn memory_rate(link: &LinkModel) -> Result<f64> {
    match link.memory {
        MemoryModel::ExponentialDecay { tau_m_s } => {
            if tau_m_s.is_infinite() {
                Ok(0.0)
            } else {
                Ok(link.t0_s / tau_m_s)
            }
        }
        MemoryModel::HardCutoff { .. } => Err(Error::SchemeMismatch {
            context: "chain-difference surrogate is defined for exponential memories".to_string(),
        }),
    }
}

/// Point configuration for the deadline-versus-exponential comparison.
/// Everything is expressed in units of the attempt time, with the swap
/// prefactor normalized to 1 so only the memory convention differs.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffCompareConfig {
    pub p0: f64,
    /// Memory deadline (or lifetime) over attempt time.
    pub tau_over_t0: f64,
    pub n_samples: u64,
    pub master_seed: u64,
}

/// Draws one shared stream of waiting-time differences and evaluates, for
/// each draw, the swap survival under a hard deadline (stored pair budget,
/// exactly as the deadline memory model enforces it) and under exponential
/// decay with single and double decay exponents. Means over the same draws
/// make the two conventions directly comparable; the matching closed-form
/// values are reported alongside with zero standard error.
pub fn compare_cutoff_vs_exponential(config: &CutoffCompareConfig) -> Result<EstimatorReport> {
    if !(config.p0 > 0.0 && config.p0 <= 1.0) {
        return Err(Error::InvalidParameter {
            field: "p0",
            value: format!("{}", config.p0),
            allowed: "(0, 1]",
        });
    }
    if !(config.tau_over_t0 >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "tau_over_t0",
            value: format!("{}", config.tau_over_t0),
            allowed: "[0, inf]",
        });
    }
    let deadline = MemoryModel::HardCutoff {
        cutoff_s: config.tau_over_t0,
    };
    let r = if config.tau_over_t0.is_infinite() {
        0.0
    } else {
        1.0 / config.tau_over_t0
    };

    #[derive(Default)]
    struct Agg {
        n: u64,
        sum_cut: Kahan,
        sum_cut_sq: Kahan,
        sum_e1: Kahan,
        sum_e1_sq: Kahan,
        sum_e2: Kahan,
        sum_e2_sq: Kahan,
    }
    let chunks = run_chunked(config.n_samples, TRIAL_CHUNK, |ci, _, count| {
        let mut rng = chunk_rng(config.master_seed, ci);
        let mut agg = Agg::default();
        for _ in 0..count {
            let n1 = sample_geometric(config.p0, &mut rng);
            let n2 = sample_geometric(config.p0, &mut rng);
            let nd = n1.abs_diff(n2) as f64;
            let cut = deadline.decay_factor(nd, 2);
            let e1 = (-nd * r).exp();
            let e2 = (-2.0 * nd * r).exp();
            agg.n += 1;
            agg.sum_cut.add(cut);
            agg.sum_cut_sq.add(cut * cut);
            agg.sum_e1.add(e1);
            agg.sum_e1_sq.add(e1 * e1);
            agg.sum_e2.add(e2);
            agg.sum_e2_sq.add(e2 * e2);
        }
        agg
    });
    let mut total = Agg::default();
    for c in chunks {
        total.n += c.n;
        total.sum_cut.add(c.sum_cut.value());
        total.sum_cut_sq.add(c.sum_cut_sq.value());
        total.sum_e1.add(c.sum_e1.value());
        total.sum_e1_sq.add(c.sum_e1_sq.value());
        total.sum_e2.add(c.sum_e2.value());
        total.sum_e2_sq.add(c.sum_e2_sq.value());
    }

    let mut report = EstimatorReport::new();
    report.push(
        keys::PS_CUTOFF,
        estimate_from_sums(total.sum_cut.value(), total.sum_cut_sq.value(), total.n),
    );
    report.push(
        keys::PS_EXP_SINGLE,
        estimate_from_sums(total.sum_e1.value(), total.sum_e1_sq.value(), total.n),
    );
    report.push(
        keys::PS_EXP_DOUBLE,
        estimate_from_sums(total.sum_e2.value(), total.sum_e2_sq.value(), total.n),
    );
    report.push(
        "analytic_cutoff_continuous",
        model_value(cutoff_avg_ps(config.p0, config.tau_over_t0, 1.0)?),
    );
    report.push(
        "analytic_cutoff_discrete",
        model_value(cutoff_avg_ps_discrete(config.p0, config.tau_over_t0, 1.0)?),
    );
    report.push(
        "analytic_exp_single_decay",
        model_value(expected_decay_factor(config.p0, r, 1)?),
    );
    report.push(
        "analytic_exp_double_decay",
        model_value(expected_decay_factor(config.p0, r, 2)?),
    );
    let ratio = total.sum_cut.value() / total.sum_e1.value();
    report.notes.push(format!(
        "deadline/exponential mean ratio over shared draws: {ratio:.6}"
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MemoryModel;

    /// Series oracle for the ratio: <n p>/(<n><p>) with
    /// G(s) = sum k pmf(k) e^{-ks} = 2 p0/(2-p0) q/(1-q)^2, q = (1-p0)e^{-s}.
    fn beta_oracle(cfg: &BetaConfig) -> f64 {
        let g = |s: f64| {
            let q = (1.0 - cfg.p0) * (-s).exp();
            2.0 * cfg.p0 / (2.0 - cfg.p0) * q / ((1.0 - q) * (1.0 - q))
        };
        let stats = attempt_expectations(cfg.p0).unwrap();
        match cfg.bsm {
            BsmKind::SinglePhoton => {
                let c = 1.0 - cfg.alpha0 * cfg.eta_d;
                let d = expected_decay_factor(cfg.p0, cfg.r, 1).unwrap();
                let num = stats.exp_n_dif + c * g(cfg.r);
                num / (stats.exp_n_dif * (1.0 + c * d))
            }
            BsmKind::TwoPhoton => {
                let d2 = expected_decay_factor(cfg.p0, cfg.r, 2).unwrap();
                g(2.0 * cfg.r) / (stats.exp_n_dif * d2)
            }
        }
    }

    #[test]
    fn beta_is_one_without_decay() {
        let cfg = BetaConfig {
            bsm: BsmKind::SinglePhoton,
            p0: 0.2,
            r: 0.0,
            alpha0: 0.8,
            eta_d: 0.95,
            n_samples: 100_000,
            master_seed: 41,
        };
        let beta = estimate_beta(&cfg).unwrap().expect_get(keys::BETA).mean;
        assert!((beta - 1.0).abs() < 1e-12, "{beta}");
    }

    #[test]
    fn beta_matches_series_oracle() {
        for (bsm, p0, r, alpha0) in [
            (BsmKind::SinglePhoton, 0.5, 1.0, 0.1),
            (BsmKind::SinglePhoton, 0.05, 0.1, 0.9),
            (BsmKind::TwoPhoton, 0.3, 0.5, 0.8),
        ] {
            let cfg = BetaConfig {
                bsm,
                p0,
                r,
                alpha0,
                eta_d: 0.95,
                n_samples: 400_000,
                master_seed: 2024,
            };
            let est = estimate_beta(&cfg).unwrap();
            let got = est.expect_get(keys::BETA);
            let want = beta_oracle(&cfg);
            assert!(
                (got.mean - want).abs() < 4.0 * got.standard_error.max(1e-4),
                "{bsm:?} p0={p0} r={r}: {} vs {want} (se {})",
                got.mean,
                got.standard_error
            );
        }
    }

    #[test]
    fn beta_two_photon_limits() {
        let mut cfg = BetaConfig {
            bsm: BsmKind::TwoPhoton,
            p0: 1e-3,
            r: 1.0,
            alpha0: 1.0,
            eta_d: 1.0,
            n_samples: 100_000,
            master_seed: 8,
        };
        let low = estimate_beta(&cfg).unwrap().expect_get(keys::BETA).mean;
        assert!(low < 0.1, "{low}");
        cfg.p0 = 0.5;
        cfg.r = 0.001;
        let high = estimate_beta(&cfg).unwrap().expect_get(keys::BETA).mean;
        assert!(high > 0.9, "{high}");
    }

    fn tdif_link(p0: f64, tau: f64) -> LinkModel {
        LinkModel {
            bsm: BsmKind::SinglePhoton,
            p0,
            alpha0: 1.0,
            eta_d: 0.95,
            t0_s: 1.0,
            memory: MemoryModel::ExponentialDecay { tau_m_s: tau },
        }
    }

    #[test]
    fn tdif_distribution_tracks_surrogate() {
        let cfg = TdifConfig {
            link: tdif_link(0.1, 100.0),
            n_trials: 200_000,
            master_seed: 6,
            max_attempts_per_chain: 1_000_000,
        };
        let rep = validate_tdif_distribution(&cfg).unwrap();
        let tv = rep.expect_get(keys::TV_DISTANCE).mean;
        assert!(tv < 0.05, "tv={tv}");
        // the surrogate's own bias is O(p0): its single-chain mean is high by
        // 3(2-p0)/(2(3-2p0)), about 1.8% at p0 = 0.1, and the max/min split
        // adds shape error. 10% only checks tracking, not model quality.
        for (emp_key, model_key) in [
            (keys::T_MAX_UNITS, keys::T_MAX_MODEL_UNITS),
            (keys::T_MIN_UNITS, keys::T_MIN_MODEL_UNITS),
        ] {
            let emp = rep.expect_get(emp_key).mean;
            let model = rep.expect_get(model_key).mean;
            assert!((emp / model - 1.0).abs() < 0.10, "{emp_key}: {emp} vs {model}");
        }
        let pmf = rep.histogram.as_ref().unwrap();
        let mass: f64 = pmf.iter().map(|(_, p)| p).sum();
        assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cutoff_comparison_matches_closed_forms() {
        let cfg = CutoffCompareConfig {
            p0: 0.1,
            tau_over_t0: 10.0,
            n_samples: 400_000,
            master_seed: 12,
        };
        let rep = compare_cutoff_vs_exponential(&cfg).unwrap();
        let cut = rep.expect_get(keys::PS_CUTOFF);
        let want_cut = rep.expect_get("analytic_cutoff_discrete").mean;
        assert!(
            (cut.mean - want_cut).abs() < 3.0 * cut.standard_error,
            "{} vs {want_cut}",
            cut.mean
        );
        let e1 = rep.expect_get(keys::PS_EXP_SINGLE);
        let want_e1 = rep.expect_get("analytic_exp_single_decay").mean;
        assert!((e1.mean - want_e1).abs() < 3.0 * e1.standard_error);
        let e2 = rep.expect_get(keys::PS_EXP_DOUBLE);
        let want_e2 = rep.expect_get("analytic_exp_double_decay").mean;
        assert!((e2.mean - want_e2).abs() < 3.0 * e2.standard_error);
    }

    #[test]
    fn infinite_deadline_gives_identical_models() {
        let cfg = CutoffCompareConfig {
            p0: 0.3,
            tau_over_t0: f64::INFINITY,
            n_samples: 10_000,
            master_seed: 1,
        };
        let rep = compare_cutoff_vs_exponential(&cfg).unwrap();
        assert_eq!(rep.expect_get(keys::PS_CUTOFF).mean, 1.0);
        assert_eq!(rep.expect_get(keys::PS_EXP_SINGLE).mean, 1.0);
        assert_eq!(rep.expect_get(keys::PS_EXP_DOUBLE).mean, 1.0);
    }
}
