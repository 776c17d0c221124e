//! All six presets across total distance. Shows why the slope changes:
//! presets with long memories keep their decay penalty flat while the
//! transmission loss takes over.

use repeater_rates::model::PresetRegistry;
use repeater_rates::workbench::{distance_sweep, DistanceSweepSection, EngineSection};

fn main() -> repeater_rates::Result<()> {
    let registry = PresetRegistry::new();
    let presets: Vec<_> = registry.iter().cloned().collect();
    let section = DistanceSweepSection {
        min_km: 10.0,
        max_km: 200.0,
        points: 20,
        presets: presets.iter().map(|p| p.name.to_string()).collect(),
    };
    let table = distance_sweep(&presets, &section, &EngineSection::default())?;

    let per = section.points as usize;
    print!("{:>8}", "km");
    for p in &presets {
        print!("{:>12}", p.name);
    }
    println!();
    for di in 0..per {
        print!("{:>8.0}", table.get_num(di, "total_distance_km").unwrap());
        for pi in 0..presets.len() {
            let rate = table.get_num(pi * per + di, "rate_hz").unwrap();
            print!("{rate:>12.2e}");
        }
        println!();
    }

    // decade slope over the last stretch, steeper = losing faster
    println!();
    println!("log10 rate drop from 100 km to 200 km:");
    for (pi, p) in presets.iter().enumerate() {
        let rate_at = |km: f64| {
            (0..per)
                .map(|di| pi * per + di)
                .find(|&row| (table.get_num(row, "total_distance_km").unwrap() - km).abs() < 5.0)
                .and_then(|row| table.get_num(row, "rate_hz"))
                .unwrap()
        };
        let drop = (rate_at(100.0) / rate_at(200.0)).log10();
        println!("  {}: {drop:.2} decades", p.name);
    }
    Ok(())
}
