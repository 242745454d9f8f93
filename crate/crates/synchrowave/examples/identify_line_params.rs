//! Joint identification of the line parameters (R, L) together with the
//! current response map.
//!
//! R and L enter the circuit residual through a softplus map, so they
//! stay positive while gradient steps move their unconstrained
//! counterparts. Starting deliberately far from the truth (5 ohm, 1 mH
//! vs 10 ohm, 0.2 mH), both drift toward the generating values as
//! training proceeds.
//!
//! ```sh
//! cargo run --release -p synchrowave --example identify_line_params
//! ```

use synchrowave::sim::{generate_dataset, DisturbanceConfig, GroundTruthIbr, LineParams};
use synchrowave::training::{train_piml_unknown, TrainConfig};
use synchrowave::waveform::{split_events, SamplingConfig};

fn main() -> synchrowave::Result<()> {
    let sampling = SamplingConfig::sixty_hz(128, 2)?;
    let truth = LineParams::default();
    let events = generate_dataset(
        &DisturbanceConfig::default(),
        &GroundTruthIbr::default(),
        &truth,
        &sampling,
    )?;
    let split = split_events(events.len(), 20, 10, 20, 1)?;
    let cfg = TrainConfig {
        max_iterations: 6000,
        learning_rate: 3e-3,
        patience: 6000,
        seed: 1,
        ..TrainConfig::default()
    };

    let trained = train_piml_unknown(&events, &split, 0.3, &cfg)?;

    println!("truth: R = {} ohm, L = {} mH", truth.resistance, truth.inductance * 1e3);
    println!("\niteration |   R (ohm) |   L (mH)");
    for p in trained
        .param_trajectory
        .iter()
        .step_by((trained.param_trajectory.len() / 12).max(1))
    {
        println!("{:>9} | {:>9.4} | {:>8.4}", p.iteration, p.resistance, p.inductance * 1e3);
    }
    let last = trained.param_trajectory.last().unwrap();
    println!("{:>9} | {:>9.4} | {:>8.4}  (final)", last.iteration, last.resistance, last.inductance * 1e3);

    let learned = trained.line_params.unwrap();
    println!(
        "\nlearned R error: {:+.1}%  |  learned L: {:.3} mH",
        100.0 * (learned.resistance - truth.resistance) / truth.resistance,
        learned.inductance * 1e3
    );
    Ok(())
}
