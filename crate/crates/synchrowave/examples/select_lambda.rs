//! Validation-driven selection of the physics weight.
//!
//! One model is trained per grid value; the lambda with the lowest
//! validation MSE wins, ties breaking toward the smaller value.
//!
//! ```sh
//! cargo run --release -p synchrowave --example select_lambda
//! ```

use synchrowave::sim::{generate_dataset, DisturbanceConfig, GroundTruthIbr, LineParams};
use synchrowave::training::{select_lambda, TrainConfig, TrainMode};
use synchrowave::waveform::{split_events, SamplingConfig};

fn main() -> synchrowave::Result<()> {
    let sampling = SamplingConfig::sixty_hz(64, 2)?;
    let line = LineParams::default();
    let events = generate_dataset(
        &DisturbanceConfig::default(),
        &GroundTruthIbr::default(),
        &line,
        &sampling,
    )?;
    let split = split_events(events.len(), 3, 10, 20, 1)?;
    let cfg = TrainConfig {
        max_iterations: 2000,
        learning_rate: 3e-3,
        patience: 800,
        seed: 1,
        ..TrainConfig::default()
    };

    // A compact grid keeps this example quick; the full default grid is
    // synchrowave::training::default_lambda_grid().
    let grid = [1e-3, 1e-2, 0.1, 1.0];
    let selection = select_lambda(&events, &split, &grid, TrainMode::PhysKnown, Some(line), &cfg)?;

    println!("{:>8} | {:>14}", "lambda", "validation MSE");
    for (lambda, mse) in &selection.candidates {
        let marker = if *lambda == selection.lambda_star { "  <- selected" } else { "" };
        println!("{lambda:>8} | {mse:>14.6e}{marker}");
    }
    println!("\nlambda* = {}", selection.lambda_star);
    Ok(())
}
