//! Named validation suites: each one runs a simulator grid against the
//! matching closed forms and reports pass/fail lines plus the measurements
//! behind them.

use crate::analytic::{
    avg_swap_single, cutoff_avg_ps, cutoff_avg_ps_discrete, edt_two_link, expected_decay_factor,
    ndif_pmf,
};
use crate::model::{BsmKind, MemoryModel, Scheme, SchemeParams};
use crate::montecarlo::{
    estimate_beta, keys, splitmix64, validate_tdif_distribution, BetaConfig, EstimatorReport,
    LinkModel, TdifConfig,
};
use crate::{Error, Result};

use super::config::{EngineSection, ValidateSection};
use super::sweep::{log_space, mc_rate};
use super::table::{Cell, ResultTable};
use super::thresholds::*;

pub const SUITES: [&str; 5] = ["beta", "tdif", "tminmax", "cutoff", "cross-engine"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// A recorded discrepancy that is documented rather than asserted.
    Flag,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Flag => "FLAG",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub lines: Vec<CheckLine>,
    /// (file stem, measurements) pairs written next to the report.
    pub tables: Vec<(String, ResultTable)>,
}

impl SuiteReport {
    fn new(suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            lines: Vec::new(),
            tables: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        self.lines.push(CheckLine {
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        });
    }

    fn flag(&mut self, name: &str, detail: String) {
        self.lines.push(CheckLine {
            name: name.to_string(),
            status: Status::Flag,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.status != Status::Fail)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("== suite {} ==\n", self.suite);
        for line in &self.lines {
            out.push_str(&format!(
                "{} | {} | {}\n",
                line.status.label(),
                line.name,
                line.detail
            ));
        }
        out.push_str(&format!(
            "suite {}: {}\n",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" }
        ));
        out
    }
}

pub fn run_suite(
    name: &str,
    cfg: &ValidateSection,
    engine: &EngineSection,
) -> Result<SuiteReport> {
    match name {
        "beta" => beta_suite(cfg, engine),
        "tdif" => tdif_suite(cfg, engine),
        "tminmax" => tminmax_suite(cfg, engine),
        "cutoff" => cutoff_suite(),
        "cross-engine" => cross_engine_suite(cfg, engine),
        other => Err(Error::Config(format!(
            "unknown suite \"{other}\"; available: {}",
            SUITES.join(", ")
        ))),
    }
}

/// Correlation-ratio grid: decade steps of p0 down from 0.5, four decay
/// rates, three fresh fidelities.
pub fn beta_p0_grid() -> Vec<f64> {
    log_space(1e-3, 0.5, 8)
}

pub const BETA_R_GRID: [f64; 4] = [0.001, 0.01, 0.1, 1.0];
pub const BETA_ALPHA_GRID: [f64; 3] = [0.9, 0.5, 0.1];
pub const BETA_ETA_D: f64 = 0.95;

fn beta_suite(cfg: &ValidateSection, engine: &EngineSection) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("beta");
    let mut table = ResultTable::new([
        "bsm", "p0", "r", "alpha0", "eta_d", "samples", "beta", "beta_se",
    ]);
    let mut seed_state = engine.seed;
    let mut min_beta = f64::INFINITY;
    let mut min_at = String::new();

    for &p0 in &beta_p0_grid() {
        for &r in &BETA_R_GRID {
            for &alpha0 in &BETA_ALPHA_GRID {
                let est = estimate_beta(&BetaConfig {
                    bsm: BsmKind::SinglePhoton,
                    p0,
                    r,
                    alpha0,
                    eta_d: BETA_ETA_D,
                    n_samples: cfg.beta_samples,
                    master_seed: splitmix64(&mut seed_state),
                })?;
                let beta = est.expect_get(keys::BETA);
                table.push_row(vec![
                    Cell::text("single-photon"),
                    Cell::num(p0),
                    Cell::num(r),
                    Cell::num(alpha0),
                    Cell::num(BETA_ETA_D),
                    Cell::num(cfg.beta_samples as f64),
                    Cell::num(beta.mean),
                    Cell::num(beta.standard_error),
                ]);
                if beta.mean < min_beta {
                    min_beta = beta.mean;
                    min_at = format!("p0={p0:.4}, r={r}, alpha0={alpha0}");
                }
            }
        }
    }
    report.check(
        "single-photon correlation-ratio floor",
        min_beta >= BETA_SINGLE_MIN,
        format!("minimum {min_beta:.5} at {min_at}; threshold {BETA_SINGLE_MIN}"),
    );

    for (p0, r, name, ok_fn) in [
        (
            1e-3,
            1.0,
            "two-photon ratio collapses at low p0, strong decay",
            Box::new(|b: f64| b < BETA_TWO_PHOTON_LOW_MAX) as Box<dyn Fn(f64) -> bool>,
        ),
        (
            0.5,
            0.001,
            "two-photon ratio near 1 at high p0, weak decay",
            Box::new(|b: f64| b > BETA_TWO_PHOTON_HIGH_MIN),
        ),
    ] {
        let est = estimate_beta(&BetaConfig {
            bsm: BsmKind::TwoPhoton,
            p0,
            r,
            alpha0: 1.0,
            eta_d: 1.0,
            n_samples: cfg.beta_samples,
            master_seed: splitmix64(&mut seed_state),
        })?;
        let beta = est.expect_get(keys::BETA);
        table.push_row(vec![
            Cell::text("two-photon"),
            Cell::num(p0),
            Cell::num(r),
            Cell::num(1.0),
            Cell::num(1.0),
            Cell::num(cfg.beta_samples as f64),
            Cell::num(beta.mean),
            Cell::num(beta.standard_error),
        ]);
        report.check(name, ok_fn(beta.mean), format!("beta {:.5} at p0={p0}, r={r}", beta.mean));
    }

    report.tables.push(("beta".to_string(), table));
    Ok(report)
}

/// The four chain-statistics regimes: (p0, attempt time over lifetime).
pub const TDIF_REGIMES: [(f64, f64); 4] = [(0.01, 0.01), (0.01, 1.0), (0.1, 0.01), (0.1, 1.0)];

/// Fresh fidelity and detector efficiency used in all chain-pair regimes.
pub const TDIF_ALPHA0: f64 = 1.0;
pub const TDIF_ETA_D: f64 = 0.95;

/// Runs the chain-pair simulator in every regime. `tdif` and `tminmax` both
/// consume these; calling this twice with the same inputs reproduces the
/// identical trials, so the two suites stay in sync without sharing state.
pub fn chain_regime_reports(
    trials: u64,
    max_attempts_per_chain: u64,
    seed: u64,
) -> Result<Vec<((f64, f64), EstimatorReport)>> {
    let mut seed_state = seed;
    TDIF_REGIMES
        .iter()
        .map(|&(p0, r)| {
            let link = LinkModel {
                bsm: BsmKind::SinglePhoton,
                p0,
                alpha0: TDIF_ALPHA0,
                eta_d: TDIF_ETA_D,
                t0_s: 1.0,
                memory: MemoryModel::ExponentialDecay { tau_m_s: 1.0 / r },
            };
            let rep = validate_tdif_distribution(&TdifConfig {
                link,
                n_trials: trials,
                master_seed: splitmix64(&mut seed_state),
                max_attempts_per_chain,
            })?;
            Ok(((p0, r), rep))
        })
        .collect()
}

fn tdif_suite(cfg: &ValidateSection, engine: &EngineSection) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("tdif");
    let runs = chain_regime_reports(cfg.tdif_trials, engine.max_attempts_per_trial, engine.seed)?;

    let mut summary = ResultTable::new(["p0", "r", "trials", "truncated", "tv_distance"]);
    let mut pmf = ResultTable::new(["p0", "r", "t_dif_units", "empirical_pmf", "model_pmf"]);
    for ((p0, r), rep) in &runs {
        let tv = rep.expect_get(keys::TV_DISTANCE);
        summary.push_row(vec![
            Cell::num(*p0),
            Cell::num(*r),
            Cell::num(cfg.tdif_trials as f64),
            Cell::num(rep.truncated_trials as f64),
            Cell::num(tv.mean),
        ]);
        report.check(
            &format!("chain-difference pmf vs geometric surrogate (p0={p0}, r={r})"),
            tv.mean < TDIF_TV_MAX,
            format!("total variation {:.5}; threshold {TDIF_TV_MAX}", tv.mean),
        );

        let avg = avg_swap_single(*p0, TDIF_ALPHA0, TDIF_ETA_D, *r)?;
        let p0_eff = 2.0 * p0 * avg.avg_ps1 / 3.0;
        for &(k, emp) in rep.histogram.as_deref().unwrap_or(&[]) {
            pmf.push_row(vec![
                Cell::num(*p0),
                Cell::num(*r),
                Cell::num(k as f64),
                Cell::num(emp),
                Cell::num(ndif_pmf(k, p0_eff)?),
            ]);
        }
    }
    report.tables.push(("tdif".to_string(), summary));
    report.tables.push(("tdif_pmf".to_string(), pmf));
    Ok(report)
}

fn tminmax_suite(cfg: &ValidateSection, engine: &EngineSection) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("tminmax");
    let runs = chain_regime_reports(cfg.tdif_trials, engine.max_attempts_per_trial, engine.seed)?;

    let mut table = ResultTable::new([
        "p0",
        "r",
        "trials",
        "quantity",
        "empirical_units",
        "empirical_se",
        "model_units",
        "rel_err",
    ]);
    for ((p0, r), rep) in &runs {
        for (quantity, emp_key, model_key) in [
            ("t_min", keys::T_MIN_UNITS, keys::T_MIN_MODEL_UNITS),
            ("t_max", keys::T_MAX_UNITS, keys::T_MAX_MODEL_UNITS),
        ] {
            let emp = rep.expect_get(emp_key);
            let model = rep.expect_get(model_key).mean;
            let rel = emp.mean / model - 1.0;
            table.push_row(vec![
                Cell::num(*p0),
                Cell::num(*r),
                Cell::num(cfg.tdif_trials as f64),
                Cell::text(quantity),
                Cell::num(emp.mean),
                Cell::num(emp.standard_error),
                Cell::num(model),
                Cell::num(rel),
            ]);
            report.check(
                &format!("{quantity} mean vs surrogate (p0={p0}, r={r})"),
                rel.abs() <= TMINMAX_REL_TOL,
                format!(
                    "empirical {:.4} vs model {model:.4}, rel err {:+.4}; tolerance {TMINMAX_REL_TOL}",
                    emp.mean, rel
                ),
            );
        }
    }
    report.tables.push(("tminmax".to_string(), table));
    Ok(report)
}

/// Reference ratios quoted for the deadline/exponential comparison at one
/// attempt time of lifetime; the computed values disagree and the suite
/// flags that rather than tuning to it.
pub const CUTOFF_REFERENCE_RATIOS: [(f64, f64); 2] = [(0.1, 48.5), (0.01, 521.0)];

pub const CUTOFF_P0_GRID: [f64; 2] = [0.01, 0.1];
pub const CUTOFF_RATIO_GRID: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

fn direct_cutoff_mass(p0: f64, max_ndif: u64) -> Result<f64> {
    let mut mass = 0.0;
    for k in 0..=max_ndif {
        mass += ndif_pmf(k, p0)?;
    }
    Ok(mass)
}

fn direct_exponential_sum(p0: f64, r: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut k = 0u64;
    loop {
        let p = ndif_pmf(k, p0)?;
        sum += p * (-(k as f64) * r).exp();
        // remaining mass bounds the remaining contribution
        let tail = 2.0 * ((k + 1) as f64 * (-p0).ln_1p()).exp() / (2.0 - p0);
        if tail < 1e-15 {
            return Ok(sum);
        }
        k += 1;
    }
}

fn cutoff_suite() -> Result<SuiteReport> {
    let mut report = SuiteReport::new("cutoff");
    let mut table = ResultTable::new([
        "p0",
        "tau_over_t0",
        "cutoff_continuous",
        "cutoff_discrete",
        "exponential_single",
        "ratio_cut_over_exp",
        "reference_ratio",
    ]);

    // identity: at even integer tau/t0 both closed forms are pmf masses, and
    // the exponential form is a convergent series, all summable directly
    let mut max_dev = 0.0f64;
    let mut identity_points = 0;
    for &p0 in &CUTOFF_P0_GRID {
        for x in [1u64, 10, 100, 1000] {
            let ratio = 2.0 * x as f64;
            let cont = cutoff_avg_ps(p0, ratio, 1.0)?;
            let disc = cutoff_avg_ps_discrete(p0, ratio, 1.0)?;
            max_dev = max_dev.max((cont - direct_cutoff_mass(p0, x - 1)?).abs());
            max_dev = max_dev.max((disc - direct_cutoff_mass(p0, x)?).abs());
            max_dev = max_dev
                .max((expected_decay_factor(p0, 1.0 / ratio, 1)? - direct_exponential_sum(p0, 1.0 / ratio)?).abs());
            identity_points += 3;
        }
    }
    report.check(
        "closed forms equal direct sums",
        max_dev < DIRECT_EVAL_ABS_TOL,
        format!("max deviation {max_dev:.3e} over {identity_points} evaluations; tolerance {DIRECT_EVAL_ABS_TOL:.0e}"),
    );

    for &p0 in &CUTOFF_P0_GRID {
        for &ratio in &CUTOFF_RATIO_GRID {
            let cont = cutoff_avg_ps(p0, ratio, 1.0)?;
            let exp_single = expected_decay_factor(p0, 1.0 / ratio, 1)?;
            let quot = cont / exp_single;
            let reference = CUTOFF_REFERENCE_RATIOS
                .iter()
                .find(|&&(rp0, _)| ratio == 1.0 && rp0 == p0)
                .map(|&(_, v)| v);
            table.push_row(vec![
                Cell::num(p0),
                Cell::num(ratio),
                Cell::num(cont),
                Cell::num(cutoff_avg_ps_discrete(p0, ratio, 1.0)?),
                Cell::num(exp_single),
                Cell::num(quot),
                reference.map_or(Cell::Missing, Cell::num),
            ]);

            if p0 == 0.1 && ratio >= CUTOFF_AGREE_MIN_RATIO {
                report.check(
                    &format!("deadline and exponential averages agree (p0={p0}, tau/t0={ratio})"),
                    (quot - 1.0).abs() <= CUTOFF_AGREE_REL,
                    format!("ratio {quot:.4}; tolerance 1 +- {CUTOFF_AGREE_REL}"),
                );
            }
            if ratio == 1.0 {
                let factor = quot.max(1.0 / quot);
                report.check(
                    &format!("conventions diverge at one attempt time (p0={p0})"),
                    factor > CUTOFF_DIVERGE_FACTOR,
                    format!("differ by {factor:.1}x; required > {CUTOFF_DIVERGE_FACTOR}x"),
                );
                if let Some(reference_value) = reference {
                    report.flag(
                        &format!("computed ratio vs published reference (p0={p0})"),
                        format!(
                            "computed {quot:.4}, published reference {reference_value}; \
                             the discrepancy is documented, not asserted"
                        ),
                    );
                }
            }
        }
    }

    report.tables.push(("cutoff".to_string(), table));
    Ok(report)
}

/// Cross-engine comparison cases: direct two-link delivery across both swap
/// kinds, with and without memory decay.
pub fn cross_engine_cases() -> Result<Vec<(&'static str, SchemeParams)>> {
    Ok(vec![
        (
            "sps ideal memory",
            SchemeParams::builder(Scheme::SpsSingle, 100e3)
                .gamma(0.2)
                .eta_s(0.75)
                .eta_d(0.95)
                .eta_m(0.7)
                .num_links(2)
                .build()?,
        ),
        (
            "sps 1ms memory",
            SchemeParams::builder(Scheme::SpsSingle, 100e3)
                .gamma(0.2)
                .eta_s(0.75)
                .eta_d(0.95)
                .eta_m(0.7)
                .tau_m_s(1e-3)
                .num_links(2)
                .build()?,
        ),
        (
            "ndpps single ideal",
            SchemeParams::builder(Scheme::NdppsSingle, 100e3)
                .eta_d(0.95)
                .num_links(2)
                .build()?,
        ),
        (
            "dpps ideal memory",
            SchemeParams::builder(Scheme::DppsDouble, 100e3)
                .eta_s(0.5)
                .eta_d(0.95)
                .build()?,
        ),
        (
            "dpps 1ms memory 20km",
            SchemeParams::builder(Scheme::DppsDouble, 20e3)
                .eta_s(0.5)
                .eta_d(0.95)
                .eta_m(0.7)
                .tau_m_s(1e-3)
                .build()?,
        ),
    ])
}

fn cross_engine_suite(cfg: &ValidateSection, engine: &EngineSection) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("cross-engine");
    let mut table = ResultTable::new([
        "case",
        "scheme",
        "bsm",
        "edt_lower_s",
        "edt_mid_s",
        "edt_upper_s",
        "mc_edt_s",
        "mc_edt_se_s",
        "trials",
        "seed",
        "mid_rel_err",
    ]);
    let mut seed_state = engine.seed;
    let mc_engine = EngineSection {
        trials: cfg.cross_trials,
        ..engine.clone()
    };

    for (case, params) in cross_engine_cases()? {
        let analytic = edt_two_link(&params)?;
        let mc = mc_rate(&params, &mc_engine, splitmix64(&mut seed_state))?;
        let mid_rel = mc.edt_s / analytic.edt_mid_s - 1.0;
        table.push_row(vec![
            Cell::text(case),
            Cell::text(params.scheme().label()),
            Cell::text(match params.scheme().bsm() {
                BsmKind::SinglePhoton => "single-photon",
                BsmKind::TwoPhoton => "two-photon",
            }),
            Cell::num(analytic.edt_lower_s),
            Cell::num(analytic.edt_mid_s),
            Cell::num(analytic.edt_upper_s),
            Cell::num(mc.edt_s),
            Cell::num(mc.edt_se_s),
            Cell::num(mc.trials as f64),
            Cell::num(mc.seed as f64),
            Cell::num(mid_rel),
        ]);

        match params.scheme().bsm() {
            BsmKind::SinglePhoton => {
                let dev = (mc.edt_s - analytic.edt_mid_s).abs();
                report.check(
                    &format!("simulated delivery time matches closed form ({case})"),
                    dev <= CROSS_ENGINE_SIGMAS * mc.edt_se_s,
                    format!(
                        "mc {:.5} vs analytic {:.5}, |dev| {:.2} se",
                        mc.edt_s,
                        analytic.edt_mid_s,
                        dev / mc.edt_se_s
                    ),
                );
            }
            BsmKind::TwoPhoton => {
                let slack = CROSS_ENGINE_SIGMAS * mc.edt_se_s;
                report.check(
                    &format!("simulated delivery time inside analytic bounds ({case})"),
                    mc.edt_s >= analytic.edt_lower_s - slack
                        && mc.edt_s <= analytic.edt_upper_s + slack,
                    format!(
                        "mc {:.5} vs bounds [{:.5}, {:.5}]",
                        mc.edt_s, analytic.edt_lower_s, analytic.edt_upper_s
                    ),
                );
                // the claim is about the true mean; allow for the estimate's
                // own sampling error on top of the 50% band
                let allowance = CROSS_ENGINE_MID_REL_MAX
                    + CROSS_ENGINE_SIGMAS * mc.edt_se_s / analytic.edt_mid_s;
                report.check(
                    &format!("bounds midpoint within 50% of simulated mean ({case})"),
                    mid_rel.abs() <= allowance,
                    format!("midpoint rel err {mid_rel:+.4}; allowance {allowance:.4}"),
                );
            }
        }
    }

    report.tables.push(("cross_engine".to_string(), table));
    Ok(report)
}
