//! Harness-level integration: the default sweep grid produces the full
//! table schema (2 regimes x 3 rates x 7 counts = 42 seed-averaged
//! rows), with learned-parameter columns only in the unknown regime.
//!
//! Cell internals are dialed down (one seed, one lambda, tiny budget);
//! the row arithmetic does not depend on them.

use std::collections::BTreeMap;

use synchrowave::sim::{generate_dataset, DisturbanceConfig, GroundTruthIbr, LineParams};
use synchrowave::sweep::{render_report, run_sweep, Regime, SweepConfig};
use synchrowave::training::TrainConfig;
use synchrowave::waveform::SamplingConfig;

#[test]
fn default_grid_yields_42_mean_rows_and_full_report_tree() {
    let sweep = SweepConfig {
        seeds: vec![1],
        lambda_grid: vec![0.3],
        ..SweepConfig::default()
    };
    assert_eq!(sweep.train_counts.len(), 7);
    assert_eq!(sweep.samples_per_cycle.len(), 3);
    assert_eq!(sweep.regimes.len(), 2);

    let train = TrainConfig {
        max_iterations: 60,
        patience: 60,
        eval_every: 30,
        learning_rate: 3e-3,
        ..TrainConfig::default()
    };
    let line = LineParams::default();
    let mut datasets = BTreeMap::new();
    for &rate in &sweep.samples_per_cycle {
        let sampling = SamplingConfig::sixty_hz(rate, sweep.window_cycles).unwrap();
        datasets.insert(
            rate,
            generate_dataset(
                &DisturbanceConfig::default(),
                &GroundTruthIbr::default(),
                &line,
                &sampling,
            )
            .unwrap(),
        );
    }

    let outcome = run_sweep(&sweep, &train, line, &datasets).unwrap();
    assert!(!outcome.any_failed());
    assert_eq!(outcome.cells.len(), 42);

    let rows = outcome.mean_rows();
    assert_eq!(rows.len(), 2 * 3 * 7);
    for row in &rows {
        match row.regime {
            Regime::KnownRl => assert!(row.r_ohm.is_none() && row.l_henry.is_none()),
            Regime::UnknownRl => assert!(row.r_ohm.is_some() && row.l_henry.is_some()),
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results");
    render_report(&outcome, &out, None).unwrap();
    let summary = std::fs::read_to_string(out.join("summary.md")).unwrap();
    let table_rows = summary
        .lines()
        .filter(|l| l.starts_with("| ") && l.chars().nth(2).is_some_and(|c| c.is_ascii_digit()))
        .count();
    assert_eq!(table_rows, 42, "summary should list all mean rows");
    for regime in ["known_rl", "unknown_rl"] {
        for rate in ["128", "64", "32"] {
            assert!(out.join(regime).join(rate).join("table.csv").exists());
            assert!(out.join(regime).join(rate).join("curve.svg").exists());
        }
    }
    // One trajectory file per unknown-regime (rate, count) pair.
    for rate in ["128", "64", "32"] {
        for count in ["3", "5", "10", "20", "30", "40", "50"] {
            assert!(out
                .join("unknown_rl")
                .join(rate)
                .join(format!("trajectory_{count}.csv"))
                .exists());
        }
    }
}
