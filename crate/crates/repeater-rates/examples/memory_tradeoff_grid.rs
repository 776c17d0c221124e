//! Memory lifetime versus retrieval efficiency for a fixed scheme and
//! distance: where does the delivered rate cross a target?
//!
//! The grid is the analytic engine only, so a dense sweep is cheap. The
//! contour points come from bisection along the efficiency axis.

use repeater_rates::model::PresetRegistry;
use repeater_rates::workbench::{
    iso_rate_curve, memory_sweep, EngineSection, MemorySweepSection,
};

fn main() -> repeater_rates::Result<()> {
    let preset = PresetRegistry::new().lookup("C")?.clone();
    let template = preset.params_at(100e3)?;

    let section = MemorySweepSection {
        tau_min_ms: 0.1,
        tau_max_ms: 10_000.0,
        tau_points: 12,
        eta_m_min: 0.1,
        eta_m_max: 1.0,
        eta_points: 10,
        target_rate_hz: Some(0.1),
    };
    let grid = memory_sweep(&template, &section, &EngineSection::default())?;

    // rate map, lifetimes down the side, efficiency across
    println!("rate (Hz) for scheme 2+2 at 100 km, eta_s=0.5, eta_d=0.95");
    print!("{:>12}", "tau_m \\ eta_m");
    for ei in 0..section.eta_points {
        let eta = grid.get_num(ei as usize, "eta_m").unwrap();
        print!("{eta:>9.2}");
    }
    println!();
    for ti in 0..section.tau_points as usize {
        let row0 = ti * section.eta_points as usize;
        let tau = grid.get_num(row0, "tau_m_ms").unwrap();
        print!("{:>10.2}ms", tau);
        for ei in 0..section.eta_points as usize {
            let rate = grid.get_num(row0 + ei, "rate_hz").unwrap();
            print!("{rate:>9.1e}");
        }
        println!();
    }

    let target = section.target_rate_hz.unwrap();
    let iso = iso_rate_curve(&template, &section, target)?;
    println!();
    println!("{target} Hz contour (lifetime columns whose efficiency range crosses it):");
    for row in 0..iso.n_rows() {
        println!(
            "  tau_m = {:9.2} ms  needs  eta_m = {:.4}",
            iso.get_num(row, "tau_m_ms").unwrap(),
            iso.get_num(row, "eta_m").unwrap()
        );
    }
    println!(
        "{} of {} columns cross; shorter lifetimes miss the target at any efficiency",
        iso.n_rows(),
        section.tau_points
    );
    Ok(())
}
