//! Experiment harness: sweeps over training-set size, sampling rate, and
//! parameter-knowledge regime, with table/chart/trajectory reporting.

mod metrics;
mod report;
mod svg;

pub use metrics::{data_efficiency, improvement_pct, DataEfficiency, EfficiencyPoint};
pub use report::{load_raw_results, render_report};
pub use svg::chart_range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sim::LineParams;
use crate::training::{
    select_lambda, train_data_only, TrainConfig, TrainMode, TrainedModel, TrajectoryPoint,
};
use crate::waveform::{split_events, test_mse, DifferentialEvent};

/// Whether the line parameters are given to the physics-informed model
/// or learned jointly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    KnownRl,
    UnknownRl,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::KnownRl => "known_rl",
            Regime::UnknownRl => "unknown_rl",
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "known_rl" => Ok(Regime::KnownRl),
            "unknown_rl" => Ok(Regime::UnknownRl),
            other => Err(Error::argument(format!("unknown regime {other:?}"))),
        }
    }
}

/// Sweep grid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub train_counts: Vec<usize>,
    pub samples_per_cycle: Vec<usize>,
    pub regimes: Vec<Regime>,
    pub seeds: Vec<u64>,
    pub lambda_grid: Vec<f64>,
    pub val_count: usize,
    pub test_count: usize,
    pub event_count: usize,
    /// Event window length in grid cycles (sets `samples_per_event`
    /// per rate).
    pub window_cycles: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            train_counts: vec![3, 5, 10, 20, 30, 40, 50],
            samples_per_cycle: vec![128, 64, 32],
            regimes: vec![Regime::KnownRl, Regime::UnknownRl],
            seeds: vec![1, 2, 3],
            lambda_grid: crate::training::default_lambda_grid(),
            val_count: 10,
            test_count: 20,
            event_count: 80,
            window_cycles: 2,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.train_counts.is_empty()
            || self.samples_per_cycle.is_empty()
            || self.regimes.is_empty()
            || self.seeds.is_empty()
        {
            return Err(Error::argument("sweep grid has an empty axis"));
        }
        let max_train = *self.train_counts.iter().max().unwrap();
        if max_train + self.val_count + self.test_count > self.event_count {
            return Err(Error::argument(format!(
                "largest split {}+{}+{} exceeds event count {}",
                max_train, self.val_count, self.test_count, self.event_count
            )));
        }
        if self.window_cycles < 2 {
            return Err(Error::argument("window must cover at least two cycles"));
        }
        Ok(())
    }
}

/// Numeric results of one successfully trained sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellMetrics {
    pub mse_data: f64,
    pub mse_phy: f64,
    pub improvement_pct: f64,
    pub lambda_star: f64,
    pub r_ohm: Option<f64>,
    pub l_henry: Option<f64>,
}

/// One sweep cell: coordinates plus outcome (metrics or error message).
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub regime: Regime,
    pub rate: usize,
    pub train_count: usize,
    pub seed: u64,
    pub outcome: std::result::Result<CellMetrics, String>,
}

/// Learned-parameter trajectory of one unknown-regime cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub rate: usize,
    pub train_count: usize,
    pub seed: u64,
    pub points: Vec<TrajectoryPoint>,
}

/// Everything a sweep produces, before rendering.
#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub cells: Vec<CellResult>,
    pub trajectories: Vec<TrajectoryRecord>,
}

impl SweepOutcome {
    pub fn any_failed(&self) -> bool {
        self.cells.iter().any(|c| c.outcome.is_err())
    }

    /// Per-(regime, rate, count) means over the seeds that succeeded,
    /// in deterministic order. The improvement percentage is recomputed
    /// from the mean MSEs.
    pub fn mean_rows(&self) -> Vec<MeanRow> {
        let mut groups: BTreeMap<(Regime, usize, usize), Vec<&CellMetrics>> = BTreeMap::new();
        for cell in &self.cells {
            if let Ok(m) = &cell.outcome {
                groups
                    .entry((cell.regime, cell.rate, cell.train_count))
                    .or_default()
                    .push(m);
            }
        }
        groups
            .into_iter()
            .map(|((regime, rate, train_count), ms)| {
                let count = ms.len() as f64;
                let mse_data = ms.iter().map(|m| m.mse_data).sum::<f64>() / count;
                let mse_phy = ms.iter().map(|m| m.mse_phy).sum::<f64>() / count;
                let lambda_star = ms.iter().map(|m| m.lambda_star).sum::<f64>() / count;
                let r_ohm = mean_opt(ms.iter().map(|m| m.r_ohm));
                let l_henry = mean_opt(ms.iter().map(|m| m.l_henry));
                MeanRow {
                    regime,
                    rate,
                    train_count,
                    seeds: ms.len(),
                    mse_data,
                    mse_phy,
                    improvement_pct: improvement_pct(mse_data, mse_phy).unwrap_or(f64::NAN),
                    lambda_star,
                    r_ohm,
                    l_henry,
                }
            })
            .collect()
    }
}

fn mean_opt(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let collected: Vec<f64> = values.flatten().collect();
    if collected.is_empty() {
        None
    } else {
        Some(collected.iter().sum::<f64>() / collected.len() as f64)
    }
}

/// Seed-averaged row of one (regime, rate, train-count) group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanRow {
    pub regime: Regime,
    pub rate: usize,
    pub train_count: usize,
    pub seeds: usize,
    pub mse_data: f64,
    pub mse_phy: f64,
    pub improvement_pct: f64,
    pub lambda_star: f64,
    pub r_ohm: Option<f64>,
    pub l_henry: Option<f64>,
}

/// Train and evaluate both models for one cell. The data-only baseline
/// is passed in so regimes sharing a (rate, count, seed) reuse it.
fn run_cell(
    regime: Regime,
    train_count: usize,
    seed: u64,
    events: &[DifferentialEvent],
    baseline: &TrainedModel,
    sweep: &SweepConfig,
    train_cfg: &TrainConfig,
    line: LineParams,
) -> Result<(CellMetrics, Option<Vec<TrajectoryPoint>>)> {
    let split = split_events(
        sweep.event_count,
        train_count,
        sweep.val_count,
        sweep.test_count,
        seed,
    )?;
    let cell_cfg = TrainConfig { seed, ..*train_cfg };

    let preds_data = baseline.predict(events, &split.test_ids)?;
    let mse_data = test_mse(&preds_data, events, &split.test_ids)?;

    let (mode, line_arg) = match regime {
        Regime::KnownRl => (TrainMode::PhysKnown, Some(line)),
        Regime::UnknownRl => (TrainMode::PhysLearnable, None),
    };
    let selection = select_lambda(events, &split, &sweep.lambda_grid, mode, line_arg, &cell_cfg)?;
    let preds_phy = selection.best.predict(events, &split.test_ids)?;
    let mse_phy = test_mse(&preds_phy, events, &split.test_ids)?;

    let (r_ohm, l_henry, trajectory) = match regime {
        Regime::KnownRl => (None, None, None),
        Regime::UnknownRl => {
            let p = selection.best.line_params.expect("learnable mode");
            (
                Some(p.resistance),
                Some(p.inductance),
                Some(selection.best.param_trajectory.clone()),
            )
        }
    };
    Ok((
        CellMetrics {
            mse_data,
            mse_phy,
            improvement_pct: improvement_pct(mse_data, mse_phy)?,
            lambda_star: selection.lambda_star,
            r_ohm,
            l_henry,
        },
        trajectory,
    ))
}

/// Execute the full sweep over `datasets` (sampling rate -> events).
///
/// Cells are independent and run on the thread pool; results are
/// collected in grid order, so scheduling cannot change the output. A
/// failing cell is recorded with its error message instead of aborting
/// the sweep.
pub fn run_sweep(
    sweep: &SweepConfig,
    train_cfg: &TrainConfig,
    line: LineParams,
    datasets: &BTreeMap<usize, Vec<DifferentialEvent>>,
) -> Result<SweepOutcome> {
    sweep.validate()?;
    for &rate in &sweep.samples_per_cycle {
        let events = datasets
            .get(&rate)
            .ok_or_else(|| Error::argument(format!("no dataset for {rate} samples/cycle")))?;
        if events.len() < sweep.event_count {
            return Err(Error::argument(format!(
                "dataset at rate {rate} has {} events, sweep needs {}",
                events.len(),
                sweep.event_count
            )));
        }
    }

    // Data-only baselines are shared by both regimes of a
    // (rate, count, seed) triple; train each once.
    let mut baseline_keys: Vec<(usize, usize, u64)> = Vec::new();
    for &rate in &sweep.samples_per_cycle {
        for &count in &sweep.train_counts {
            for &seed in &sweep.seeds {
                baseline_keys.push((rate, count, seed));
            }
        }
    }
    let baselines: BTreeMap<(usize, usize, u64), Result<TrainedModel>> = baseline_keys
        .par_iter()
        .map(|&(rate, count, seed)| {
            let result = split_events(
                sweep.event_count,
                count,
                sweep.val_count,
                sweep.test_count,
                seed,
            )
            .and_then(|split| {
                train_data_only(&datasets[&rate], &split, &TrainConfig { seed, ..*train_cfg })
            });
            ((rate, count, seed), result)
        })
        .collect();

    let mut cell_keys: Vec<(Regime, usize, usize, u64)> = Vec::new();
    for &regime in &sweep.regimes {
        for &rate in &sweep.samples_per_cycle {
            for &count in &sweep.train_counts {
                for &seed in &sweep.seeds {
                    cell_keys.push((regime, rate, count, seed));
                }
            }
        }
    }

    let computed: Vec<(CellResult, Option<TrajectoryRecord>)> = cell_keys
        .par_iter()
        .map(|&(regime, rate, count, seed)| {
            let outcome = match &baselines[&(rate, count, seed)] {
                Ok(baseline) => run_cell(
                    regime,
                    count,
                    seed,
                    &datasets[&rate],
                    baseline,
                    sweep,
                    train_cfg,
                    line,
                )
                .map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            };
            let (outcome, trajectory) = match outcome {
                Ok((metrics, trajectory)) => (
                    Ok(metrics),
                    trajectory.map(|points| TrajectoryRecord {
                        rate,
                        train_count: count,
                        seed,
                        points,
                    }),
                ),
                Err(e) => (Err(e), None),
            };
            (
                CellResult {
                    regime,
                    rate,
                    train_count: count,
                    seed,
                    outcome,
                },
                trajectory,
            )
        })
        .collect();

    let mut outcome = SweepOutcome::default();
    for (cell, trajectory) in computed {
        outcome.cells.push(cell);
        if let Some(t) = trajectory {
            outcome.trajectories.push(t);
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{generate_dataset, DisturbanceConfig, GroundTruthIbr};
    use crate::waveform::SamplingConfig;

    fn tiny_sweep_config() -> SweepConfig {
        SweepConfig {
            train_counts: vec![2, 3],
            samples_per_cycle: vec![16],
            regimes: vec![Regime::KnownRl, Regime::UnknownRl],
            seeds: vec![1],
            lambda_grid: vec![0.1, 1.0],
            val_count: 3,
            test_count: 4,
            event_count: 10,
            window_cycles: 2,
        }
    }

    fn tiny_datasets(cfg: &SweepConfig) -> BTreeMap<usize, Vec<DifferentialEvent>> {
        let mut out = BTreeMap::new();
        for &rate in &cfg.samples_per_cycle {
            let sampling = SamplingConfig::sixty_hz(rate, cfg.window_cycles).unwrap();
            let events = generate_dataset(
                &DisturbanceConfig {
                    event_count: cfg.event_count,
                    ..DisturbanceConfig::default()
                },
                &GroundTruthIbr::default(),
                &LineParams::default(),
                &sampling,
            )
            .unwrap();
            out.insert(rate, events);
        }
        out
    }

    fn quick_train() -> TrainConfig {
        TrainConfig {
            max_iterations: 200,
            patience: 200,
            eval_every: 100,
            learning_rate: 3e-3,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn sweep_produces_one_cell_per_grid_point_in_order() {
        let sweep = tiny_sweep_config();
        let datasets = tiny_datasets(&sweep);
        let out = run_sweep(&sweep, &quick_train(), LineParams::default(), &datasets).unwrap();
        assert_eq!(out.cells.len(), 2 * 1 * 2 * 1);
        assert!(!out.any_failed());
        // Known regime never reports learned parameters, unknown always does.
        for cell in &out.cells {
            let m = cell.outcome.as_ref().unwrap();
            match cell.regime {
                Regime::KnownRl => assert!(m.r_ohm.is_none() && m.l_henry.is_none()),
                Regime::UnknownRl => assert!(m.r_ohm.is_some() && m.l_henry.is_some()),
            }
        }
        // Unknown-regime cells each leave a trajectory.
        assert_eq!(out.trajectories.len(), 2);
    }

    #[test]
    fn sweep_is_deterministic() {
        let sweep = tiny_sweep_config();
        let datasets = tiny_datasets(&sweep);
        let a = run_sweep(&sweep, &quick_train(), LineParams::default(), &datasets).unwrap();
        let b = run_sweep(&sweep, &quick_train(), LineParams::default(), &datasets).unwrap();
        assert_eq!(a.cells, b.cells);
        assert_eq!(a.trajectories, b.trajectories);
    }

    #[test]
    fn improvement_in_cells_is_consistent_with_mses() {
        let sweep = tiny_sweep_config();
        let datasets = tiny_datasets(&sweep);
        let out = run_sweep(&sweep, &quick_train(), LineParams::default(), &datasets).unwrap();
        for cell in &out.cells {
            let m = cell.outcome.as_ref().unwrap();
            let recomputed = improvement_pct(m.mse_data, m.mse_phy).unwrap();
            assert!((recomputed - m.improvement_pct).abs() < 1e-9);
        }
    }

    #[test]
    fn missing_dataset_rate_is_an_error() {
        let sweep = tiny_sweep_config();
        let datasets = BTreeMap::new();
        assert!(run_sweep(&sweep, &quick_train(), LineParams::default(), &datasets).is_err());
    }

    #[test]
    fn oversized_grid_is_rejected() {
        let mut sweep = tiny_sweep_config();
        sweep.train_counts = vec![50];
        assert!(sweep.validate().is_err());
    }
}
