//! Trial-level simulation of direct two-link delivery against the closed
//! forms, at increasing trial counts.
//!
//! For a two-photon swap the analytic engine gives bounds: the upper bound is
//! in fact the exact mean (each failed swap dumps both memories, so every
//! attempt costs the slower link's wait), and the simulation converges to it.
//! The midpoint and lower bound are the published approximations.

use repeater_rates::analytic::edt_two_link;
use repeater_rates::model::{PresetRegistry, SchemeParams};
use repeater_rates::montecarlo::{keys, simulate_two_link, LinkModel, SimConfig};

fn main() -> repeater_rates::Result<()> {
    let params: SchemeParams = PresetRegistry::new().lookup("C")?.params_at(100e3)?;
    let analytic = edt_two_link(&params)?;
    println!(
        "analytic EDT bounds: [{:.2}, {:.2}] s, midpoint {:.2} s",
        analytic.edt_lower_s, analytic.edt_upper_s, analytic.edt_mid_s
    );

    let link = LinkModel::from_params(&params)?;
    for trials in [2_000u64, 20_000, 200_000] {
        let report = simulate_two_link(&SimConfig::new(link.clone(), trials, 7))?;
        let edt = report.expect_get(keys::EDT_S);
        let ps = report.expect_get(keys::MEAN_PS);
        println!(
            "{trials:>7} trials: EDT {:.2} +- {:.2} s   mean swap prob {:.4e} +- {:.1e}",
            edt.mean, edt.standard_error, ps.mean, ps.standard_error
        );
    }

    println!();
    println!("wait statistics per attempt (exact values in parentheses):");
    let report = simulate_two_link(&SimConfig::new(link, 50_000, 7))?;
    let stats = repeater_rates::analytic::attempt_expectations(link_p0(&params)?)?;
    for (key, exact) in [
        (keys::N_MAX, stats.exp_n_max),
        (keys::N_MIN, stats.exp_n_min),
        (keys::N_DIF, stats.exp_n_dif),
    ] {
        let est = report.expect_get(key);
        println!("  {key:<18} {:>10.2}  ({exact:.2})", est.mean);
    }
    Ok(())
}

fn link_p0(params: &SchemeParams) -> repeater_rates::Result<f64> {
    Ok(LinkModel::from_params(params)?.p0)
}
