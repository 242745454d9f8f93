//! Raw waveforms to differential signatures.
//!
//! The differential transform dx[l] = x[l] - x[l - N] subtracts the
//! sample one grid cycle earlier, so any steady periodic carrier cancels
//! and only the disturbance remains.
//!
//! ```sh
//! cargo run --release -p synchrowave --example differential_transform
//! ```

use synchrowave::sim::{generate_raw_dataset, DisturbanceConfig, GroundTruthIbr, LineParams};
use synchrowave::waveform::{differential, SamplingConfig};

fn main() -> synchrowave::Result<()> {
    let sampling = SamplingConfig::sixty_hz(64, 2)?;
    let disturbance = DisturbanceConfig {
        event_count: 1,
        seed: 42,
        ..DisturbanceConfig::default()
    };
    let raw_events = generate_raw_dataset(
        &disturbance,
        &GroundTruthIbr::default(),
        &LineParams::default(),
        &sampling,
    )?;
    let event = &raw_events[0];

    let peak_raw = event.v1.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let diff = differential(event, &sampling)?;
    let peak_diff = diff.dv1.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    println!("raw v1 peak:          {peak_raw:.2} V (carrier + disturbance)");
    println!("differential dv1 peak: {peak_diff:.2} V (disturbance only)");

    // A purely steady event (no disturbance) maps to zero.
    let steady = generate_raw_dataset(
        &DisturbanceConfig {
            amplitude_range: (0.0, 0.0),
            event_count: 1,
            seed: 42,
            ..DisturbanceConfig::default()
        },
        &GroundTruthIbr::default(),
        &LineParams::default(),
        &sampling,
    )?;
    let steady_diff = differential(&steady[0], &sampling)?;
    let residue = steady_diff.dv1.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    println!("steady-state residue:  {residue:.3e} V");

    // First few samples side by side.
    println!("\n l |     raw v1 |    dv1");
    for l in 0..8 {
        println!("{l:>2} | {:>10.3} | {:>7.3}", event.v1[l], diff.dv1[l]);
    }
    Ok(())
}
