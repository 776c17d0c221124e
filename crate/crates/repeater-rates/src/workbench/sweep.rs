//! Grid sweeps over memory parameters and distance, and the simulated rate
//! estimate that backs the `mc` engine selection.
//!
//! Cells are independent work items executed in parallel; rows are always
//! emitted in canonical axis order (outer axis first, ascending), so a sweep
//! rerun is byte-identical no matter how it was scheduled.

use rayon::prelude::*;

use crate::analytic::{delivered_rate, RateResult};
use crate::model::{HardwarePreset, SchemeParams};
use crate::montecarlo::{
    keys, simulate_postselected, simulate_two_link, splitmix64, LinkModel, SimConfig,
};
use crate::{Error, Result};

use super::config::{DistanceSweepSection, EngineKind, EngineSection, MemorySweepSection};
use super::table::{Cell, ResultTable};
use super::thresholds::ISO_RATE_REL_TOL;

pub fn lin_space(min: f64, max: f64, points: u32) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let step = (max - min) / (points - 1) as f64;
    let mut v: Vec<f64> = (0..points).map(|i| min + step * i as f64).collect();
    // both endpoints are the requested bounds, not their rounded images
    *v.last_mut().unwrap() = max;
    v
}

/// Requires positive bounds.
pub fn log_space(min: f64, max: f64, points: u32) -> Vec<f64> {
    let (lmin, lmax) = (min.ln(), max.ln());
    let mut v: Vec<f64> = lin_space(lmin, lmax, points).into_iter().map(f64::exp).collect();
    *v.first_mut().unwrap() = min;
    *v.last_mut().unwrap() = max;
    v
}

pub(crate) const PARAM_COLUMNS: [&str; 10] = [
    "scheme",
    "num_links",
    "total_distance_km",
    "gamma",
    "eta_s",
    "eta_d",
    "eta_m",
    "tau_m_ms",
    "attenuation_length_km",
    "fiber_speed_m_per_s",
];

pub(crate) fn param_cells(p: &SchemeParams) -> Vec<Cell> {
    vec![
        Cell::text(p.scheme().label()),
        Cell::num(p.num_links() as f64),
        Cell::num(p.total_distance_m() / 1e3),
        p.gamma().map_or(Cell::Missing, Cell::num),
        Cell::num(p.eta_s()),
        Cell::num(p.eta_d()),
        Cell::num(p.eta_m()),
        Cell::num(p.tau_m_s() * 1e3),
        Cell::num(p.l_att_m() / 1e3),
        Cell::num(p.c_fiber_m_per_s()),
    ]
}

pub(crate) const ANALYTIC_COLUMNS: [&str; 6] = [
    "rate_hz",
    "edt_lower_s",
    "edt_mid_s",
    "edt_upper_s",
    "final_alpha",
    "beta_assumption",
];

/// `None` reports a configuration whose delivery time underflowed: zero
/// rate, infinite delivery time.
pub(crate) fn analytic_cells(res: Option<&RateResult>) -> Vec<Cell> {
    match res {
        Some(r) => vec![
            Cell::num(r.rate_hz),
            Cell::num(r.edt_lower_s),
            Cell::num(r.edt_mid_s),
            Cell::num(r.edt_upper_s),
            Cell::num(r.final_alpha),
            Cell::text(r.beta_assumption.to_string()),
        ],
        None => vec![
            Cell::num(0.0),
            Cell::num(f64::INFINITY),
            Cell::num(f64::INFINITY),
            Cell::num(f64::INFINITY),
            Cell::Missing,
            Cell::Missing,
        ],
    }
}

/// Rate computation that treats delivery-time underflow as data (zero rate)
/// rather than an error; any other failure is a real configuration problem.
pub(crate) fn rate_or_underflow(params: &SchemeParams) -> Result<Option<RateResult>> {
    match delivered_rate(params) {
        Ok(r) => Ok(Some(r)),
        Err(Error::RateUnderflow) => Ok(None),
        Err(e) => Err(e),
    }
}

pub(crate) const MC_COLUMNS: [&str; 7] = [
    "mc_rate_hz",
    "mc_rate_se_hz",
    "mc_edt_s",
    "mc_edt_se_s",
    "mc_trials",
    "mc_truncated",
    "mc_seed",
];

/// Simulated delivery-rate estimate for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McRate {
    pub edt_s: f64,
    pub edt_se_s: f64,
    pub rate_hz: f64,
    pub rate_se_hz: f64,
    pub trials: u64,
    pub truncated: u64,
    pub seed: u64,
}

/// Runs the simulator matching the delivery topology (direct two-link, or
/// double-chain postselection for four links) and converts the mean delivery
/// time into a rate with a first-order error propagation.
pub fn mc_rate(params: &SchemeParams, engine: &EngineSection, seed: u64) -> Result<McRate> {
    let link = LinkModel::from_params(params)?;
    let mut config = SimConfig::new(link, engine.trials, seed);
    config.max_attempts_per_trial = engine.max_attempts_per_trial;
    let report = match params.num_links() {
        2 => simulate_two_link(&config)?,
        _ => simulate_postselected(&config)?,
    };
    let edt = report.expect_get(keys::EDT_S);
    Ok(McRate {
        edt_s: edt.mean,
        edt_se_s: edt.standard_error,
        rate_hz: 1.0 / edt.mean,
        rate_se_hz: edt.standard_error / (edt.mean * edt.mean),
        trials: engine.trials,
        truncated: report.truncated_trials,
        seed,
    })
}

pub(crate) fn mc_cells(mc: &McRate) -> Vec<Cell> {
    vec![
        Cell::num(mc.rate_hz),
        Cell::num(mc.rate_se_hz),
        Cell::num(mc.edt_s),
        Cell::num(mc.edt_se_s),
        Cell::num(mc.trials as f64),
        Cell::num(mc.truncated as f64),
        Cell::num(mc.seed as f64),
    ]
}

pub(crate) fn result_columns(front: &[&str], kind: EngineKind) -> Vec<String> {
    let mut cols: Vec<String> = front.iter().map(|s| s.to_string()).collect();
    cols.extend(PARAM_COLUMNS.iter().map(|s| s.to_string()));
    cols.push("engine".to_string());
    if kind.runs_analytic() {
        cols.extend(ANALYTIC_COLUMNS.iter().map(|s| s.to_string()));
    }
    if kind.runs_mc() {
        cols.extend(MC_COLUMNS.iter().map(|s| s.to_string()));
    }
    cols
}

/// One result row for `params`: parameter tuple, engine tag, then the
/// selected engines' outputs. `cell_index` salts the per-cell seed.
pub(crate) fn engine_cells(
    params: &SchemeParams,
    engine: &EngineSection,
    cell_index: u64,
) -> Result<Vec<Cell>> {
    let mut cells = param_cells(params);
    cells.push(Cell::text(engine.kind.label()));
    if engine.kind.runs_analytic() {
        cells.extend(analytic_cells(rate_or_underflow(params)?.as_ref()));
    }
    if engine.kind.runs_mc() {
        let mut s = engine.seed;
        let base = splitmix64(&mut s);
        let mut salted = base ^ cell_index;
        let cell_seed = splitmix64(&mut salted);
        cells.extend(mc_cells(&mc_rate(params, engine, cell_seed)?));
    }
    Ok(cells)
}

fn check_axis(name: &str, min: f64, max: f64, points: u32, log: bool) -> Result<()> {
    let bounds_ok = min.is_finite() && max.is_finite() && min < max && (!log || min > 0.0);
    if !bounds_ok || points < 2 {
        return Err(Error::Config(format!(
            "{name} axis needs min < max ({}finite bounds) and at least 2 points",
            if log { "positive, " } else { "" }
        )));
    }
    Ok(())
}

/// Rate over a lifetime x memory-efficiency grid at fixed scheme and
/// distance. Lifetimes are the outer axis, log-spaced ascending; efficiency
/// is linear ascending.
pub fn memory_sweep(
    template: &SchemeParams,
    section: &MemorySweepSection,
    engine: &EngineSection,
) -> Result<ResultTable> {
    check_axis("tau_m", section.tau_min_ms, section.tau_max_ms, section.tau_points, true)?;
    check_axis("eta_m", section.eta_m_min, section.eta_m_max, section.eta_points, false)?;
    let taus_ms = log_space(section.tau_min_ms, section.tau_max_ms, section.tau_points);
    let etas = lin_space(section.eta_m_min, section.eta_m_max, section.eta_points);

    let cells: Vec<(f64, f64)> = taus_ms
        .iter()
        .flat_map(|&t| etas.iter().map(move |&e| (t, e)))
        .collect();
    let rows: Vec<Result<Vec<Cell>>> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(tau_ms, eta))| {
            let params = template.with_memory(eta, tau_ms / 1e3)?;
            engine_cells(&params, engine, i as u64)
        })
        .collect();

    let mut table = ResultTable::new(result_columns(&[], engine.kind));
    for row in rows {
        table.push_row(row?);
    }
    Ok(table)
}

/// (lifetime, efficiency) pairs achieving `target_hz` within
/// [`ISO_RATE_REL_TOL`], located by bisection along the efficiency axis of
/// each lifetime column. Uses the analytic engine: rate is continuous and
/// nondecreasing in memory efficiency, so bisection is exact and cheap.
/// Columns whose entire efficiency range misses the target produce no row.
pub fn iso_rate_curve(
    template: &SchemeParams,
    section: &MemorySweepSection,
    target_hz: f64,
) -> Result<ResultTable> {
    if !(target_hz > 0.0 && target_hz.is_finite()) {
        return Err(Error::Config(format!(
            "target rate must be positive and finite, got {target_hz}"
        )));
    }
    check_axis("tau_m", section.tau_min_ms, section.tau_max_ms, section.tau_points, true)?;
    check_axis("eta_m", section.eta_m_min, section.eta_m_max, section.eta_points, false)?;
    let taus_ms = log_space(section.tau_min_ms, section.tau_max_ms, section.tau_points);

    let locate = |tau_ms: f64| -> Result<Option<(SchemeParams, f64)>> {
        let rate_at = |eta: f64| -> Result<(SchemeParams, f64)> {
            let params = template.with_memory(eta, tau_ms / 1e3)?;
            let rate = rate_or_underflow(&params)?.map_or(0.0, |r| r.rate_hz);
            Ok((params, rate))
        };
        let within = |rate: f64| (rate / target_hz - 1.0).abs() <= ISO_RATE_REL_TOL;
        let (mut lo, mut hi) = (section.eta_m_min, section.eta_m_max);
        let (p_lo, r_lo) = rate_at(lo)?;
        if r_lo >= target_hz {
            return Ok(within(r_lo).then_some((p_lo, r_lo)));
        }
        let (p_hi, r_hi) = rate_at(hi)?;
        if r_hi <= target_hz {
            return Ok(within(r_hi).then_some((p_hi, r_hi)));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let (p, r) = rate_at(mid)?;
            if within(r) {
                return Ok(Some((p, r)));
            }
            if r < target_hz {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(None)
    };

    let points: Vec<Result<Option<(SchemeParams, f64)>>> =
        taus_ms.par_iter().map(|&t| locate(t)).collect();

    let mut cols = result_columns(&["target_rate_hz"], EngineKind::Analytic);
    cols.truncate(cols.len() - ANALYTIC_COLUMNS.len());
    cols.push("rate_hz".to_string());
    let mut table = ResultTable::new(cols);
    for point in points {
        if let Some((params, rate)) = point? {
            let mut row = vec![Cell::num(target_hz)];
            row.extend(param_cells(&params));
            row.push(Cell::text(EngineKind::Analytic.label()));
            row.push(Cell::num(rate));
            table.push_row(row);
        }
    }
    Ok(table)
}

/// Rate versus total distance for each preset, presets in given order,
/// distances ascending.
pub fn distance_sweep(
    presets: &[HardwarePreset],
    section: &DistanceSweepSection,
    engine: &EngineSection,
) -> Result<ResultTable> {
    check_axis("distance", section.min_km, section.max_km, section.points, true)?;
    if presets.is_empty() {
        return Err(Error::Config("no presets selected".to_string()));
    }
    let distances = lin_space(section.min_km, section.max_km, section.points);

    let cells: Vec<(usize, f64)> = (0..presets.len())
        .flat_map(|pi| distances.iter().map(move |&d| (pi, d)))
        .collect();
    let rows: Vec<Result<Vec<Cell>>> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(pi, km))| {
            let preset = &presets[pi];
            let params = preset.params_at(km * 1e3)?;
            let mut row = vec![Cell::text(preset.name)];
            row.extend(engine_cells(&params, engine, i as u64)?);
            Ok(row)
        })
        .collect();

    let mut table = ResultTable::new(result_columns(&["preset"], engine.kind));
    for row in rows {
        table.push_row(row?);
    }
    Ok(table)
}
