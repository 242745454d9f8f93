//! Training procedures: data-only, physics-informed with known line
//! parameters, and physics-informed with jointly learned parameters,
//! plus validation-driven selection of the physics weight.
//!
//! Every procedure is a pure function of (dataset, split, config): rerun
//! equality is bitwise. Data-only training is literally the composite
//! path with the residual branch disabled, so `lambda = 0` with a shared
//! seed reproduces the data-only parameters exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::nn::{AdamConfig, AdamState, BatchCache, LearnableLineParams, Mlp, MlpShape};
use crate::sim::LineParams;
use crate::training::loss::{
    loss_and_grad, mse_prepared, predict_events, LossWorkspace, Normalization, PreparedEvents,
};
use crate::waveform::{DatasetSplit, DifferentialEvent, EventId};

/// Training-loop configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub max_iterations: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Stop when the validation MSE has not improved for this many
    /// iterations.
    pub patience: u64,
    /// Validation cadence in iterations.
    pub eval_every: u64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            patience: 2_000,
            eval_every: 100,
            seed: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::argument("max_iterations must be positive"));
        }
        if self.patience > self.max_iterations {
            return Err(Error::argument("patience cannot exceed max_iterations"));
        }
        if self.eval_every == 0 {
            return Err(Error::argument("eval_every must be positive"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::argument("learning_rate must be positive"));
        }
        Ok(())
    }

    fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }
}

/// Which objective a model was trained under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    DataOnly,
    PhysKnown,
    PhysLearnable,
}

impl std::fmt::Display for TrainMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TrainMode::DataOnly => "data_only",
            TrainMode::PhysKnown => "phys_known",
            TrainMode::PhysLearnable => "phys_learnable",
        };
        f.write_str(s)
    }
}

/// One point of the learned line-parameter trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iteration: u64,
    pub resistance: f64,
    pub inductance: f64,
}

/// One validation-cadence log row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainLogRow {
    pub iteration: u64,
    pub train_loss: f64,
    pub val_mse: f64,
    pub resistance: Option<f64>,
    pub inductance: Option<f64>,
}

/// A trained predictor with its scaling, objective metadata, and the
/// line parameters it used or learned.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub model: Mlp,
    pub normalization: Normalization,
    pub mode: TrainMode,
    pub lambda: f64,
    /// Fixed line parameters (known regime) or final learned values
    /// (learnable regime); absent for the data-only baseline.
    pub line_params: Option<LineParams>,
    /// `(iteration, R, L)` recorded at every validation point; empty
    /// unless the parameters are learnable.
    pub param_trajectory: Vec<TrajectoryPoint>,
    /// Objective value on the training events at the returned parameters.
    pub final_train_loss: f64,
    /// Data term alone at the returned parameters, amperes squared.
    pub final_train_data_loss: f64,
    /// Validation MSE at the returned parameters.
    pub final_val_mse: f64,
    /// Iteration count actually executed before early stopping.
    pub iterations_run: u64,
    pub log: Vec<TrainLogRow>,
}

impl TrainedModel {
    /// De-standardized predictions for the listed events.
    pub fn predict(
        &self,
        events: &[DifferentialEvent],
        ids: &[EventId],
    ) -> Result<BTreeMap<EventId, Vec<f64>>> {
        predict_events(&self.model, &self.normalization, events, ids)
    }
}

/// Purely data-driven baseline: minimizes the empirical MSE on the
/// training events, early-stopping on validation MSE.
pub fn train_data_only(
    events: &[DifferentialEvent],
    split: &DatasetSplit,
    cfg: &TrainConfig,
) -> Result<TrainedModel> {
    train(events, split, TrainMode::DataOnly, None, 0.0, cfg)
}

/// Physics-informed training with fixed line parameters.
pub fn train_piml_known(
    events: &[DifferentialEvent],
    split: &DatasetSplit,
    line: LineParams,
    lambda: f64,
    cfg: &TrainConfig,
) -> Result<TrainedModel> {
    if !line.resistance.is_finite() || !line.inductance.is_finite() {
        return Err(Error::argument("line parameters must be finite"));
    }
    train(events, split, TrainMode::PhysKnown, Some(line), lambda, cfg)
}

/// Physics-informed training that jointly learns the line parameters via
/// the softplus reparameterization.
pub fn train_piml_unknown(
    events: &[DifferentialEvent],
    split: &DatasetSplit,
    lambda: f64,
    cfg: &TrainConfig,
) -> Result<TrainedModel> {
    train(events, split, TrainMode::PhysLearnable, None, lambda, cfg)
}

fn train(
    events: &[DifferentialEvent],
    split: &DatasetSplit,
    mode: TrainMode,
    fixed_line: Option<LineParams>,
    lambda: f64,
    cfg: &TrainConfig,
) -> Result<TrainedModel> {
    cfg.validate()?;
    if !(lambda >= 0.0) {
        return Err(Error::argument(format!("lambda must be nonnegative, got {lambda}")));
    }
    if split.train_ids.is_empty() {
        return Err(Error::argument("training set is empty"));
    }
    if split.val_ids.is_empty() {
        return Err(Error::argument("validation set is empty"));
    }

    let norm = Normalization::fit(events, &split.train_ids)?;
    let train_set = PreparedEvents::new(events, &split.train_ids, &norm)?;
    let val_set = PreparedEvents::new(events, &split.val_ids, &norm)?;

    let learnable = mode == TrainMode::PhysLearnable;
    let mut mlp = Mlp::init(cfg.seed, MlpShape::standard());
    let mlp_len = mlp.param_count();
    let mut params = mlp.params().to_vec();
    let mut line_view = LearnableLineParams::initial();
    if learnable {
        params.push(line_view.theta_r);
        params.push(line_view.theta_l);
    }

    let mut adam = AdamState::new(params.len(), cfg.adam());
    let mut ws = LossWorkspace::default();
    let mut val_cache = BatchCache::default();

    let mut log: Vec<TrainLogRow> = Vec::new();
    let mut trajectory: Vec<TrajectoryPoint> = Vec::new();
    let mut best_val = f64::INFINITY;
    // Early stopping restores the network block only: the learned line
    // parameters keep converging through the residual term after the
    // fit has plateaued, so their final values are the estimate.
    let mut best_mlp = params[..mlp_len].to_vec();
    let mut best_iter = 0u64;
    let iterations_run;

    let mut iter = 0u64;
    loop {
        mlp.set_params(&params[..mlp_len]);
        if learnable {
            line_view.theta_r = params[mlp_len];
            line_view.theta_l = params[mlp_len + 1];
        }
        let lg = loss_and_grad(
            &mlp,
            &train_set,
            &norm,
            lambda,
            fixed_line,
            learnable.then_some(&line_view),
            &mut ws,
        )?;
        if !lg.loss.is_finite() {
            return Err(Error::numeric(format!(
                "training loss became non-finite at iteration {iter}"
            )));
        }

        if iter % cfg.eval_every == 0 || iter == cfg.max_iterations {
            let val_mse = mse_prepared(&mlp, &norm, &val_set, &mut val_cache)?;
            if !val_mse.is_finite() {
                return Err(Error::numeric(format!(
                    "validation MSE became non-finite at iteration {iter}"
                )));
            }
            log.push(TrainLogRow {
                iteration: iter,
                train_loss: lg.loss,
                val_mse,
                resistance: learnable.then(|| line_view.resistance()),
                inductance: learnable.then(|| line_view.inductance()),
            });
            if learnable {
                trajectory.push(TrajectoryPoint {
                    iteration: iter,
                    resistance: line_view.resistance(),
                    inductance: line_view.inductance(),
                });
            }
            if val_mse < best_val {
                best_val = val_mse;
                best_mlp.copy_from_slice(&params[..mlp_len]);
                best_iter = iter;
            } else if iter - best_iter >= cfg.patience {
                iterations_run = iter;
                break;
            }
        }

        if iter == cfg.max_iterations {
            iterations_run = iter;
            break;
        }
        adam.step(&mut params, &lg.grad)?;
        iter += 1;
    }

    // Return the network with the best validation MSE and the line
    // parameters from the last executed iteration; predictions depend
    // only on the network block, so `best_val` stays exact.
    params[..mlp_len].copy_from_slice(&best_mlp);
    mlp.set_params(&params[..mlp_len]);
    if learnable {
        line_view.theta_r = params[mlp_len];
        line_view.theta_l = params[mlp_len + 1];
    }

    let final_eval = loss_and_grad(
        &mlp,
        &train_set,
        &norm,
        lambda,
        fixed_line,
        learnable.then_some(&line_view),
        &mut ws,
    )?;
    let line_params = if learnable {
        Some(LineParams {
            resistance: line_view.resistance(),
            inductance: line_view.inductance(),
        })
    } else {
        fixed_line
    };

    Ok(TrainedModel {
        model: mlp,
        normalization: norm,
        mode,
        lambda: if mode == TrainMode::DataOnly { 0.0 } else { lambda },
        line_params,
        param_trajectory: trajectory,
        final_train_loss: final_eval.loss,
        final_train_data_loss: final_eval.data_loss,
        final_val_mse: best_val,
        iterations_run,
        log,
    })
}

/// Outcome of the validation sweep over the physics-weight grid.
#[derive(Debug, Clone)]
pub struct LambdaSelection {
    pub lambda_star: f64,
    /// `(lambda, validation MSE)` in grid order.
    pub candidates: Vec<(f64, f64)>,
    /// The trained model at `lambda_star`.
    pub best: TrainedModel,
}

/// Index of the smallest value, first occurrence winning ties — the
/// tie-break toward smaller lambda when the grid is ascending.
pub(crate) fn argmin_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Train one model per grid value and pick the lambda minimizing the
/// validation MSE. Grid trainings are independent and run in parallel;
/// results are collected in grid order so scheduling cannot change the
/// outcome.
pub fn select_lambda(
    events: &[DifferentialEvent],
    split: &DatasetSplit,
    grid: &[f64],
    mode: TrainMode,
    line: Option<LineParams>,
    cfg: &TrainConfig,
) -> Result<LambdaSelection> {
    if grid.is_empty() {
        return Err(Error::argument("lambda grid is empty"));
    }
    if grid.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::argument("lambda grid values must be positive"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::argument("lambda grid must be strictly ascending"));
    }
    if mode == TrainMode::DataOnly {
        return Err(Error::argument("lambda selection applies to physics modes"));
    }
    if mode == TrainMode::PhysKnown && line.is_none() {
        return Err(Error::argument("known-parameter mode needs line parameters"));
    }

    let trained: Vec<Result<TrainedModel>> = grid
        .par_iter()
        .map(|&lambda| match mode {
            TrainMode::PhysKnown => train_piml_known(events, split, line.unwrap(), lambda, cfg),
            TrainMode::PhysLearnable => train_piml_unknown(events, split, lambda, cfg),
            TrainMode::DataOnly => unreachable!(),
        })
        .collect();
    let mut models = Vec::with_capacity(trained.len());
    for t in trained {
        models.push(t?);
    }
    let val_mses: Vec<f64> = models.iter().map(|m| m.final_val_mse).collect();
    let best_idx = argmin_first(&val_mses);
    let candidates: Vec<(f64, f64)> = grid.iter().copied().zip(val_mses).collect();
    Ok(LambdaSelection {
        lambda_star: grid[best_idx],
        candidates,
        best: models.swap_remove(best_idx),
    })
}

/// The 11-point physics-weight grid used by default: decades and
/// half-decades from 1e-5 to 3.
pub fn default_lambda_grid() -> Vec<f64> {
    vec![
        1e-5, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0,
    ]
}
