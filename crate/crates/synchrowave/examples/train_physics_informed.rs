//! Physics-informed training with known line parameters, compared to the
//! data-only baseline on the same split and seed.
//!
//! The composite loss adds the squared circuit residual
//! dv2 - dv1 + R*y + L*dy/dt of the predicted current, weighted by
//! lambda, to the usual data-fit term.
//!
//! ```sh
//! cargo run --release -p synchrowave --example train_physics_informed
//! ```

use synchrowave::sim::{generate_dataset, DisturbanceConfig, GroundTruthIbr, LineParams};
use synchrowave::sweep::improvement_pct;
use synchrowave::training::{train_data_only, train_piml_known, TrainConfig};
use synchrowave::waveform::{split_events, test_mse, SamplingConfig};

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
        max_iterations: 3000,
        learning_rate: 3e-3,
        patience: 1000,
        seed: 1,
        ..TrainConfig::default()
    };

    let baseline = train_data_only(&events, &split, &cfg)?;
    let preds = baseline.predict(&events, &split.test_ids)?;
    let mse_data = test_mse(&preds, &events, &split.test_ids)?;

    let lambda = 0.3;
    let physics = train_piml_known(&events, &split, line, lambda, &cfg)?;
    let preds = physics.predict(&events, &split.test_ids)?;
    let mse_phy = test_mse(&preds, &events, &split.test_ids)?;

    println!("training events:     {}", split.train_ids.len());
    println!("data-only test MSE:  {mse_data:.6e} A^2");
    println!("physics test MSE:    {mse_phy:.6e} A^2 (lambda = {lambda})");
    println!("improvement:         {:+.2}%", improvement_pct(mse_data, mse_phy)?);
    Ok(())
}
