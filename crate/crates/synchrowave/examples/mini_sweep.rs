//! A small end-to-end sweep: two training-set sizes, one sampling rate,
//! both parameter regimes, writing the full CSV/SVG report tree.
//!
//! ```sh
//! cargo run --release -p synchrowave --example mini_sweep
//! ```

use std::collections::BTreeMap;
use synchrowave::sim::{generate_dataset, DisturbanceConfig, GroundTruthIbr, LineParams};
use synchrowave::sweep::{render_report, run_sweep, Regime, SweepConfig};
use synchrowave::training::TrainConfig;
use synchrowave::waveform::SamplingConfig;

fn main() -> synchrowave::Result<()> {
    let sweep = SweepConfig {
        train_counts: vec![3, 10],
        samples_per_cycle: vec![64],
        regimes: vec![Regime::KnownRl, Regime::UnknownRl],
        seeds: vec![1],
        lambda_grid: vec![1e-3, 3e-2, 0.3, 3.0],
        val_count: 10,
        test_count: 20,
        event_count: 40,
        window_cycles: 2,
    };
    let train = TrainConfig {
        max_iterations: 1500,
        learning_rate: 3e-3,
        patience: 600,
        ..TrainConfig::default()
    };
    let line = LineParams::default();

    let mut datasets = BTreeMap::new();
    for &rate in &sweep.samples_per_cycle {
        let sampling = SamplingConfig::sixty_hz(rate, sweep.window_cycles)?;
        let disturbance = DisturbanceConfig {
            event_count: sweep.event_count,
            ..DisturbanceConfig::default()
        };
        datasets.insert(
            rate,
            generate_dataset(&disturbance, &GroundTruthIbr::default(), &line, &sampling)?,
        );
    }

    let outcome = run_sweep(&sweep, &train, line, &datasets)?;
    let out = std::path::Path::new("target/example_output/mini_sweep");
    if out.exists() {
        std::fs::remove_dir_all(out)?;
    }
    render_report(&outcome, out, None)?;

    println!("report tree written under {}:", out.display());
    for cell in &outcome.cells {
        match &cell.outcome {
            Ok(m) => println!(
                "  {} rate {} count {:>2}: data {:.3e}, physics {:.3e} ({:+.1}%)",
                cell.regime, cell.rate, cell.train_count, m.mse_data, m.mse_phy, m.improvement_pct
            ),
            Err(e) => println!("  {} rate {} count {:>2}: FAILED ({e})", cell.regime, cell.rate, cell.train_count),
        }
    }
    println!("\nsee {}/summary.md", out.display());
    Ok(())
}
