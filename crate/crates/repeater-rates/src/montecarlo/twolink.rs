//! Trial simulation of the plain two-link chain.

use crate::analytic::{swap_single_photon, swap_two_photon};
use crate::model::{BsmKind, MemoryModel, SchemeParams, DEFAULT_MAX_ATTEMPTS_PER_TRIAL};
use crate::{Error, Result};

use super::estimator::{
    estimate_from_sums, run_chunked, Estimate, EstimatorReport, Kahan, SwapAttempt, TrialRecord,
};
use super::rng::{chunk_rng, sample_geometric};
use super::{keys, TRIAL_CHUNK};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Everything the simulator needs to know about one elementary-link pair:
/// the per-attempt generation probability, fresh fidelity, swap flavor, and
/// how stored states age.
///
/// Built from a validated parameter set with [`LinkModel::from_params`], or
/// directly for calibration grids that pin `p0` by hand.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkModel {
    pub bsm: BsmKind,
    pub p0: f64,
    pub alpha0: f64,
    pub eta_d: f64,
    pub t0_s: f64,
    pub memory: MemoryModel,
}

impl LinkModel {
    pub fn from_params(params: &SchemeParams) -> Result<LinkModel> {
        let gen = crate::analytic::generation(params)?;
        Ok(LinkModel {
            bsm: params.scheme().bsm(),
            p0: gen.p0,
            alpha0: gen.alpha0,
            eta_d: params.eta_d(),
            t0_s: params.geometry().t0_s,
            memory: params.memory_model(),
        })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("p0", self.p0),
            ("alpha0", self.alpha0),
            ("eta_d", self.eta_d),
        ] {
            if !(v.is_finite() && v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidParameter {
                    field,
                    value: format!("{v}"),
                    allowed: "(0, 1]",
                });
            }
        }
        if !(self.t0_s.is_finite() && self.t0_s > 0.0) {
            return Err(Error::InvalidParameter {
                field: "t0_s",
                value: format!("{}", self.t0_s),
                allowed: "(0, inf)",
            });
        }
        Ok(())
    }

    /// Stored excitations aging while the early link waits.
    pub(crate) fn decay_multiplicity(&self) -> u32 {
        match self.bsm {
            BsmKind::SinglePhoton => 1,
            BsmKind::TwoPhoton => 2,
        }
    }

    /// Swap outcome for one attempt where the early link waited `n_dif`
    /// attempts: (alpha, p_s) with the early fidelity aged by the memory
    /// model.
    pub(crate) fn attempt_outcome(&self, n_dif: u64) -> (f64, f64) {
        let aged = self.alpha0
            * self
                .memory
                .decay_factor(n_dif as f64 * self.t0_s, self.decay_multiplicity());
        let outcome = match self.bsm {
            BsmKind::SinglePhoton => swap_single_photon(aged, self.alpha0, self.eta_d),
            BsmKind::TwoPhoton => swap_two_photon(aged, self.alpha0, self.eta_d),
        }
        // alpha0 > 0 and the fresh side never decays, so the degenerate
        // both-vacuum case is unreachable here
        .expect("swap inputs in range");
        (outcome.alpha, outcome.p_s)
    }
}

/// One simulator run: the link pair, how many trials, and the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub link: LinkModel,
    pub n_trials: u64,
    pub master_seed: u64,
    /// Swap-attempt budget per trial; a trial that exhausts it is counted in
    /// `truncated_trials` and excluded from the means.
    pub max_attempts_per_trial: u64,
    /// Keep full [`TrialRecord`]s for this many leading trials.
    pub record_trials: u64,
}

impl SimConfig {
    pub fn new(link: LinkModel, n_trials: u64, master_seed: u64) -> SimConfig {
        SimConfig {
            link,
            n_trials,
            master_seed,
            max_attempts_per_trial: DEFAULT_MAX_ATTEMPTS_PER_TRIAL,
            record_trials: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        self.link.validate()?;
        if self.n_trials == 0 {
            return Err(Error::InvalidParameter {
                field: "n_trials",
                value: "0".to_string(),
                allowed: "positive",
            });
        }
        if self.max_attempts_per_trial == 0 {
            return Err(Error::InvalidParameter {
                field: "max_attempts_per_trial",
                value: "0".to_string(),
                allowed: "positive",
            });
        }
        Ok(())
    }
}

#[derive(Default)]
struct Agg {
    trials_ok: u64,
    truncated: u64,
    // per completed trial
    sum_units: Kahan,
    sum_units_sq: Kahan,
    sum_attempts: Kahan,
    sum_attempts_sq: Kahan,
    // per attempt, over every trial including truncated ones
    attempts_all: u64,
    sum_nmax: u128,
    sum_nmin: u128,
    sum_ndif: u128,
    sum_nmax_sq: Kahan,
    sum_nmin_sq: Kahan,
    sum_ndif_sq: Kahan,
    sum_ps: Kahan,
    sum_ps_sq: Kahan,
    sum_alpha: Kahan,
    sum_alpha_sq: Kahan,
    // heralded attempts only
    sum_final_alpha: Kahan,
    sum_final_alpha_sq: Kahan,
    records: Vec<TrialRecord>,
}

impl Agg {
    fn absorb(&mut self, other: Agg) {
        self.trials_ok += other.trials_ok;
        self.truncated += other.truncated;
        self.sum_units.add(other.sum_units.value());
        self.sum_units_sq.add(other.sum_units_sq.value());
        self.sum_attempts.add(other.sum_attempts.value());
        self.sum_attempts_sq.add(other.sum_attempts_sq.value());
        self.attempts_all += other.attempts_all;
        self.sum_nmax += other.sum_nmax;
        self.sum_nmin += other.sum_nmin;
        self.sum_ndif += other.sum_ndif;
        self.sum_nmax_sq.add(other.sum_nmax_sq.value());
        self.sum_nmin_sq.add(other.sum_nmin_sq.value());
        self.sum_ndif_sq.add(other.sum_ndif_sq.value());
        self.sum_ps.add(other.sum_ps.value());
        self.sum_ps_sq.add(other.sum_ps_sq.value());
        self.sum_alpha.add(other.sum_alpha.value());
        self.sum_alpha_sq.add(other.sum_alpha_sq.value());
        self.sum_final_alpha.add(other.sum_final_alpha.value());
        self.sum_final_alpha_sq.add(other.sum_final_alpha_sq.value());
        self.records.extend(other.records);
    }
}

fn run_trial(link: &LinkModel, max_attempts: u64, rng: &mut ChaCha8Rng, agg: &mut Agg, record: bool) {
    let mut units: u64 = 0;
    let mut attempts: u64 = 0;
    let mut attempt_log = record.then(Vec::new);
    loop {
        if attempts == max_attempts {
            agg.truncated += 1;
            if let Some(log) = attempt_log {
                agg.records.push(TrialRecord {
                    attempts: log,
                    total_time_s: units as f64 * link.t0_s,
                    final_alpha: None,
                    postselection_rounds: None,
                    truncated: true,
                });
            }
            return;
        }
        attempts += 1;
        let n1 = sample_geometric(link.p0, rng);
        let n2 = sample_geometric(link.p0, rng);
        let n_max = n1.max(n2);
        let n_dif = n1.abs_diff(n2);
        units += n_max;
        let (alpha, p_s) = link.attempt_outcome(n_dif);
        let success = rng.gen::<f64>() < p_s;

        agg.attempts_all += 1;
        agg.sum_nmax += n_max as u128;
        agg.sum_nmin += n1.min(n2) as u128;
        agg.sum_ndif += n_dif as u128;
        let fmax = n_max as f64;
        let fmin = n1.min(n2) as f64;
        let fdif = n_dif as f64;
        agg.sum_nmax_sq.add(fmax * fmax);
        agg.sum_nmin_sq.add(fmin * fmin);
        agg.sum_ndif_sq.add(fdif * fdif);
        agg.sum_ps.add(p_s);
        agg.sum_ps_sq.add(p_s * p_s);
        agg.sum_alpha.add(alpha);
        agg.sum_alpha_sq.add(alpha * alpha);
        if let Some(log) = attempt_log.as_mut() {
            log.push(SwapAttempt {
                n1,
                n2,
                n_max,
                n_dif,
                swap_success: success,
            });
        }

        if success {
            agg.trials_ok += 1;
            let u = units as f64;
            agg.sum_units.add(u);
            agg.sum_units_sq.add(u * u);
            let a = attempts as f64;
            agg.sum_attempts.add(a);
            agg.sum_attempts_sq.add(a * a);
            agg.sum_final_alpha.add(alpha);
            agg.sum_final_alpha_sq.add(alpha * alpha);
            if let Some(log) = attempt_log {
                agg.records.push(TrialRecord {
                    attempts: log,
                    total_time_s: u * link.t0_s,
                    final_alpha: matches!(link.bsm, BsmKind::SinglePhoton).then_some(alpha),
                    postselection_rounds: None,
                    truncated: false,
                });
            }
            return;
        }
    }
}

/// Simulates trials of the two-link chain: draw both links' attempt counts,
/// age the early link's stored state, draw the heralding outcome; repeat
/// until heralded. Wall time accumulates `n_max * t0` per swap attempt.
///
/// Per-attempt quantities (`mean_ps`, `alpha_unconditional`, the waiting
/// statistics) average over every attempt, which samples the same
/// distribution the closed forms integrate. The delivery-time and
/// per-heralding quantities average over completed trials.
pub fn simulate_two_link(config: &SimConfig) -> Result<EstimatorReport> {
    config.validate()?;
    let link = &config.link;
    let chunks = run_chunked(config.n_trials, TRIAL_CHUNK, |ci, first, count| {
        let mut rng = chunk_rng(config.master_seed, ci);
        let mut agg = Agg::default();
        for i in 0..count {
            let record = first + i < config.record_trials;
            run_trial(link, config.max_attempts_per_trial, &mut rng, &mut agg, record);
        }
        agg
    });
    let mut total = Agg::default();
    for chunk in chunks {
        total.absorb(chunk);
    }

    let mut report = EstimatorReport::new();
    report.truncated_trials = total.truncated;
    report.records = total.records;

    let ok = total.trials_ok;
    let edt_units = estimate_from_sums(total.sum_units.value(), total.sum_units_sq.value(), ok);
    report.push(
        keys::EDT_S,
        Estimate {
            mean: edt_units.mean * link.t0_s,
            standard_error: edt_units.standard_error * link.t0_s,
            n_samples: ok,
        },
    );
    report.push(
        keys::SWAP_ATTEMPTS,
        estimate_from_sums(total.sum_attempts.value(), total.sum_attempts_sq.value(), ok),
    );
    report.push(
        keys::SUCCESS_RATE,
        estimate_from_sums(ok as f64, ok as f64, config.n_trials),
    );

    let at = total.attempts_all;
    report.push(
        keys::MEAN_PS,
        estimate_from_sums(total.sum_ps.value(), total.sum_ps_sq.value(), at),
    );
    report.push(
        keys::N_MAX,
        estimate_from_sums(total.sum_nmax as f64, total.sum_nmax_sq.value(), at),
    );
    report.push(
        keys::N_MIN,
        estimate_from_sums(total.sum_nmin as f64, total.sum_nmin_sq.value(), at),
    );
    report.push(
        keys::N_DIF,
        estimate_from_sums(total.sum_ndif as f64, total.sum_ndif_sq.value(), at),
    );
    if link.bsm == BsmKind::SinglePhoton {
        report.push(
            keys::ALPHA_UNCONDITIONAL,
            estimate_from_sums(total.sum_alpha.value(), total.sum_alpha_sq.value(), at),
        );
        report.push(
            keys::FINAL_ALPHA,
            estimate_from_sums(
                total.sum_final_alpha.value(),
                total.sum_final_alpha_sq.value(),
                ok,
            ),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{attempt_expectations, avg_swap_single, avg_swap_two_photon};
    use crate::model::Scheme;

    fn toy_link(bsm: BsmKind, p0: f64, alpha0: f64, eta_d: f64, tau_m_s: f64) -> LinkModel {
        LinkModel {
            bsm,
            p0,
            alpha0,
            eta_d,
            t0_s: 1.0,
            memory: MemoryModel::ExponentialDecay { tau_m_s },
        }
    }

    #[test]
    fn deterministic_two_photon_edt_is_two_units() {
        let link = toy_link(BsmKind::TwoPhoton, 1.0, 1.0, 1.0, f64::INFINITY);
        let cfg = SimConfig::new(link, 200_000, 31);
        let rep = simulate_two_link(&cfg).unwrap();
        let edt = rep.expect_get(keys::EDT_S);
        assert!(
            (edt.mean - 2.0).abs() < 3.0 * edt.standard_error,
            "mean={} se={}",
            edt.mean,
            edt.standard_error
        );
        assert_eq!(rep.truncated_trials, 0);
    }

    #[test]
    fn per_attempt_statistics_match_closed_forms() {
        let p0 = 0.1;
        let link = toy_link(BsmKind::TwoPhoton, p0, 0.9, 0.9, 10.0);
        let cfg = SimConfig::new(link, 300_000, 77);
        let rep = simulate_two_link(&cfg).unwrap();
        let stats = attempt_expectations(p0).unwrap();
        for (key, want) in [
            (keys::N_MAX, stats.exp_n_max),
            (keys::N_MIN, stats.exp_n_min),
            (keys::N_DIF, stats.exp_n_dif),
        ] {
            let got = rep.expect_get(key);
            assert!(
                (got.mean - want).abs() < 3.0 * got.standard_error,
                "{key}: {} vs {want} (se {})",
                got.mean,
                got.standard_error
            );
        }
        let ps = rep.expect_get(keys::MEAN_PS);
        let want = avg_swap_two_photon(p0, 0.9, 0.9, 0.1).unwrap();
        assert!((ps.mean - want).abs() < 3.0 * ps.standard_error);
    }

    #[test]
    fn single_photon_averages_match_closed_forms() {
        let (p0, alpha0, eta_d) = (0.2, 0.8, 0.95);
        let link = toy_link(BsmKind::SinglePhoton, p0, alpha0, eta_d, 2.0);
        let cfg = SimConfig::new(link, 300_000, 5);
        let rep = simulate_two_link(&cfg).unwrap();
        let want = avg_swap_single(p0, alpha0, eta_d, 0.5).unwrap();
        let got_a = rep.expect_get(keys::ALPHA_UNCONDITIONAL);
        assert!(
            (got_a.mean - want.avg_alpha1).abs() < 3.0 * got_a.standard_error,
            "{} vs {}",
            got_a.mean,
            want.avg_alpha1
        );
        let got_p = rep.expect_get(keys::MEAN_PS);
        assert!((got_p.mean - want.avg_ps1).abs() < 3.0 * got_p.standard_error);
        // success-biased fidelity differs from the unconditional mean
        assert!(rep.get(keys::FINAL_ALPHA).is_some());
    }

    #[test]
    fn records_satisfy_identities() {
        let link = toy_link(BsmKind::SinglePhoton, 0.3, 0.7, 0.9, 5.0);
        let mut cfg = SimConfig::new(link.clone(), 64, 13);
        cfg.record_trials = 64;
        let rep = simulate_two_link(&cfg).unwrap();
        assert_eq!(rep.records.len(), 64);
        for rec in &rep.records {
            let mut units = 0u64;
            for at in &rec.attempts {
                assert_eq!(at.n_max, at.n1.max(at.n2));
                assert_eq!(at.n_dif, at.n1.abs_diff(at.n2));
                assert_eq!(at.n_max, at.n1.min(at.n2) + at.n_dif);
                units += at.n_max;
            }
            assert_eq!(rec.total_time_s, units as f64 * link.t0_s);
            assert!(rec.attempts.iter().rev().skip(1).all(|a| !a.swap_success));
            if !rec.truncated {
                assert!(rec.attempts.last().unwrap().swap_success);
                assert!(rec.final_alpha.is_some());
            }
        }
    }

    #[test]
    fn truncation_is_reported_not_dropped() {
        let link = toy_link(BsmKind::TwoPhoton, 0.5, 0.01, 0.1, f64::INFINITY);
        let mut cfg = SimConfig::new(link, 500, 3);
        cfg.max_attempts_per_trial = 1;
        let rep = simulate_two_link(&cfg).unwrap();
        let ok = rep.expect_get(keys::EDT_S).n_samples;
        assert_eq!(ok + rep.truncated_trials, 500);
        assert!(rep.truncated_trials > 0);
    }

    #[test]
    fn identical_config_is_bit_identical_across_worker_counts() {
        let link = toy_link(BsmKind::SinglePhoton, 0.15, 0.8, 0.95, 3.0);
        let cfg = SimConfig::new(link, 50_000, 99);
        let run_with = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_two_link(&cfg).unwrap())
        };
        let a = run_with(1);
        let b = run_with(4);
        assert_eq!(a.quantities.len(), b.quantities.len());
        for ((na, ea), (nb, eb)) in a.quantities.iter().zip(&b.quantities) {
            assert_eq!(na, nb);
            assert_eq!(ea.mean.to_bits(), eb.mean.to_bits(), "{na}");
            assert_eq!(
                ea.standard_error.to_bits(),
                eb.standard_error.to_bits(),
                "{na}"
            );
        }
        let c = run_with(4);
        assert_eq!(b, c);
    }

    #[test]
    fn from_params_carries_generation_and_geometry() {
        let p = SchemeParams::builder(Scheme::DppsDouble, 100_000.0)
            .eta_s(0.5)
            .eta_d(0.95)
            .eta_m(0.7)
            .tau_m_s(1e-3)
            .build()
            .unwrap();
        let link = LinkModel::from_params(&p).unwrap();
        assert_eq!(link.bsm, BsmKind::TwoPhoton);
        assert!((link.alpha0 - 0.49).abs() < 1e-12);
        assert_eq!(link.t0_s, 2.5e-4);
        assert_eq!(
            link.memory,
            MemoryModel::ExponentialDecay { tau_m_s: 1e-3 }
        );
    }
}
