//! Train the purely data-driven baseline on a few disturbance events.
//!
//! ```sh
//! cargo run --release -p synchrowave --example train_data_only
//! ```

use synchrowave::sim::{generate_dataset, DisturbanceConfig, GroundTruthIbr, LineParams};
use synchrowave::training::{train_data_only, TrainConfig};
use synchrowave::waveform::{split_events, test_mse, SamplingConfig};

fn main() -> synchrowave::Result<()> {
    let sampling = SamplingConfig::sixty_hz(64, 2)?;
    let events = generate_dataset(
        &DisturbanceConfig::default(),
        &GroundTruthIbr::default(),
        &LineParams::default(),
        &sampling,
    )?;

    // 5 training events, 10 validation, 20 test.
    let split = split_events(events.len(), 5, 10, 20, 1)?;
    let cfg = TrainConfig {
        max_iterations: 3000,
        learning_rate: 3e-3,
        patience: 1000,
        seed: 1,
        ..TrainConfig::default()
    };
    let trained = train_data_only(&events, &split, &cfg)?;

    println!("iterations run:   {}", trained.iterations_run);
    println!("final train loss: {:.6e} A^2", trained.final_train_data_loss);
    println!("validation MSE:   {:.6e} A^2", trained.final_val_mse);

    let preds = trained.predict(&events, &split.test_ids)?;
    let mse = test_mse(&preds, &events, &split.test_ids)?;
    println!("test MSE:         {mse:.6e} A^2 over {} events", split.test_ids.len());
    Ok(())
}
