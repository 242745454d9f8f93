//! Generate a circuit-consistent synthetic disturbance dataset and write
//! it to JSON.
//!
//! ```sh
//! cargo run --release -p synchrowave --example generate_dataset
//! ```

use synchrowave::dataset::{save_json, DifferentialDataset};
use synchrowave::sim::{generate_dataset, DisturbanceConfig, GroundTruthIbr, LineParams};
use synchrowave::waveform::SamplingConfig;

fn main() -> synchrowave::Result<()> {
    let sampling = SamplingConfig::sixty_hz(128, 2)?;
    let disturbance = DisturbanceConfig {
        event_count: 80,
        seed: 1,
        ..DisturbanceConfig::default()
    };
    let ibr = GroundTruthIbr::default();
    let line = LineParams::default();

    let events = generate_dataset(&disturbance, &ibr, &line, &sampling)?;

    // Every event satisfies the discrete circuit equation exactly, by
    // construction: dv2 = dv1 - R*di1 - L*d(di1)/dt.
    let mut worst_residual = 0.0f64;
    let mut peak_voltage = 0.0f64;
    for e in &events {
        peak_voltage = e.dv1.iter().fold(peak_voltage, |m, x| m.max(x.abs()));
        for l in 1..e.len() {
            let r = e.dv2[l] - e.dv1[l]
                + line.resistance * e.di1[l]
                + line.inductance * (e.di1[l] - e.di1[l - 1]) / sampling.dt;
            worst_residual = worst_residual.max(r.abs());
        }
    }
    println!("events:            {}", events.len());
    println!("samples per event: {}", events[0].len());
    println!("peak |dv1|:        {peak_voltage:.2} V");
    println!("worst residual:    {worst_residual:.3e} V (relative {:.1e})", worst_residual / peak_voltage);

    let out = std::path::Path::new("target/example_output/dataset.128.json");
    let file = DifferentialDataset::from_events(sampling, Some(line), &events);
    save_json(out, &file)?;
    println!("dataset written to {}", out.display());
    Ok(())
}
