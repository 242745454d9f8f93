//! Loss definitions: data-fit MSE, the discrete circuit residual, and
//! the composite physics-informed objective with exact gradients.
//!
//! Units are physical throughout: the data term is in amperes squared,
//! the residual term in volts squared, and the physics weight `lambda`
//! bridges the two exactly as in the composite objective.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::nn::{BatchCache, LearnableLineParams, Mlp};
use crate::sim::LineParams;
use crate::waveform::{DifferentialEvent, EventId, SamplingConfig};

/// Input/target scaling fitted on the training events: the voltage input
/// is standardized, the time input is the in-window fraction, and the
/// target current is scaled by its standard deviation (predictions are
/// de-scaled before any loss or metric).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub v1_mean: f64,
    pub v1_std: f64,
    pub i1_std: f64,
}

impl Normalization {
    /// Fit on the listed events. Degenerate (constant) channels fall back
    /// to unit scale so all-zero datasets remain trainable.
    pub fn fit(events: &[DifferentialEvent], ids: &[EventId]) -> Result<Self> {
        let selected = select_events(events, ids)?;
        let mut count = 0usize;
        let mut v_sum = 0.0;
        let mut i_sum = 0.0;
        for e in &selected {
            count += e.len();
            v_sum += e.dv1.iter().sum::<f64>();
            i_sum += e.di1.iter().sum::<f64>();
        }
        if count == 0 {
            return Err(Error::argument("cannot fit normalization on zero samples"));
        }
        let v1_mean = v_sum / count as f64;
        let i_mean = i_sum / count as f64;
        let mut v_var = 0.0;
        let mut i_var = 0.0;
        for e in &selected {
            v_var += e.dv1.iter().map(|x| (x - v1_mean) * (x - v1_mean)).sum::<f64>();
            i_var += e.di1.iter().map(|x| (x - i_mean) * (x - i_mean)).sum::<f64>();
        }
        let guard = |s: f64| if s > 1e-12 { s } else { 1.0 };
        Ok(Self {
            v1_mean,
            v1_std: guard((v_var / count as f64).sqrt()),
            i1_std: guard((i_var / count as f64).sqrt()),
        })
    }

    /// Network input row for sample `l` of an event of length `n`.
    #[inline]
    pub fn input(&self, dv1: f64, l: usize, n: usize) -> [f64; 2] {
        [(dv1 - self.v1_mean) / self.v1_std, l as f64 / n as f64]
    }
}

/// Events gathered into flat batch tensors. All events share the same
/// length `n`; event `e` occupies samples `[e*n, (e+1)*n)`.
#[derive(Debug, Clone)]
pub struct PreparedEvents {
    pub n: usize,
    pub count: usize,
    pub dt: f64,
    /// Standardized `(voltage, time)` rows, length `count * n * 2`.
    pub inputs: Vec<f64>,
    /// Target currents in amperes, length `count * n`.
    pub targets: Vec<f64>,
    pub dv1: Vec<f64>,
    pub dv2: Vec<f64>,
    pub ids: Vec<EventId>,
}

fn select_events<'a>(
    events: &'a [DifferentialEvent],
    ids: &[EventId],
) -> Result<Vec<&'a DifferentialEvent>> {
    if ids.is_empty() {
        return Err(Error::argument("event id set is empty"));
    }
    let by_id: BTreeMap<EventId, &DifferentialEvent> =
        events.iter().map(|e| (e.event_id, e)).collect();
    ids.iter()
        .map(|id| {
            by_id
                .get(id)
                .copied()
                .ok_or_else(|| Error::argument(format!("no event with id {id}")))
        })
        .collect()
}

impl PreparedEvents {
    pub fn new(
        events: &[DifferentialEvent],
        ids: &[EventId],
        norm: &Normalization,
    ) -> Result<Self> {
        let selected = select_events(events, ids)?;
        let n = selected[0].len();
        if n < 2 {
            return Err(Error::argument("events must have at least two samples"));
        }
        let dt = selected[0].sampling.dt;
        let count = selected.len();
        let mut inputs = Vec::with_capacity(count * n * 2);
        let mut targets = Vec::with_capacity(count * n);
        let mut dv1 = Vec::with_capacity(count * n);
        let mut dv2 = Vec::with_capacity(count * n);
        for e in &selected {
            if e.len() != n {
                return Err(Error::argument(format!(
                    "event {} has {} samples, expected {n}",
                    e.event_id,
                    e.len()
                )));
            }
            for (l, &v) in e.dv1.iter().enumerate() {
                let row = norm.input(v, l, n);
                inputs.push(row[0]);
                inputs.push(row[1]);
            }
            targets.extend_from_slice(&e.di1);
            dv1.extend_from_slice(&e.dv1);
            dv2.extend_from_slice(&e.dv2);
        }
        Ok(Self {
            n,
            count,
            dt,
            inputs,
            targets,
            dv1,
            dv2,
            ids: ids.to_vec(),
        })
    }

    pub fn sample_count(&self) -> usize {
        self.count * self.n
    }
}

/// Discrete circuit residual of a predicted current sequence:
/// `r[l] = dv2[l] - dv1[l] + R*y[l] + L*(y[l] - y[l-1])/dt` for
/// `l in [1, n)`; the onset sample has no predecessor and is excluded.
/// Returns `n - 1` values in volts.
pub fn physics_residual(
    dv1: &[f64],
    dv2: &[f64],
    predicted_di1: &[f64],
    line: &LineParams,
    sampling: &SamplingConfig,
) -> Result<Vec<f64>> {
    let n = dv1.len();
    if dv2.len() != n || predicted_di1.len() != n {
        return Err(Error::argument(format!(
            "length mismatch: dv1 {n}, dv2 {}, predicted {}",
            dv2.len(),
            predicted_di1.len()
        )));
    }
    if n < 2 {
        return Err(Error::argument("residual needs at least two samples"));
    }
    Ok((1..n)
        .map(|l| {
            residual_at(
                dv1[l],
                dv2[l],
                predicted_di1[l],
                predicted_di1[l - 1],
                line.resistance,
                line.inductance,
                sampling.dt,
            )
        })
        .collect())
}

/// Single residual sample; shared by the public operation and the
/// training gradient path so both produce identical values.
#[inline]
fn residual_at(dv1: f64, dv2: f64, y: f64, y_prev: f64, r: f64, l: f64, dt: f64) -> f64 {
    let c = dv2 - dv1;
    let derivative_term = l * (y - y_prev) / dt;
    c + r * y + derivative_term
}

/// De-standardized model predictions for one event.
pub fn predict_event(mlp: &Mlp, norm: &Normalization, event: &DifferentialEvent) -> Vec<f64> {
    let n = event.len();
    let mut inputs = Vec::with_capacity(n * 2);
    for (l, &v) in event.dv1.iter().enumerate() {
        let row = norm.input(v, l, n);
        inputs.push(row[0]);
        inputs.push(row[1]);
    }
    let mut cache = BatchCache::default();
    mlp.forward_batch(&inputs, &mut cache)
        .expect("two-column inputs");
    cache.outputs().iter().map(|o| o * norm.i1_std).collect()
}

/// Predictions for several events, keyed by event id.
pub fn predict_events(
    mlp: &Mlp,
    norm: &Normalization,
    events: &[DifferentialEvent],
    ids: &[EventId],
) -> Result<BTreeMap<EventId, Vec<f64>>> {
    let selected = select_events(events, ids)?;
    Ok(selected
        .iter()
        .map(|e| (e.event_id, predict_event(mlp, norm, e)))
        .collect())
}

/// Empirical data-fit loss: mean over events of the per-event sample
/// average of squared prediction errors, in amperes squared.
pub fn data_loss(
    mlp: &Mlp,
    norm: &Normalization,
    events: &[DifferentialEvent],
    ids: &[EventId],
) -> Result<f64> {
    let prepared = PreparedEvents::new(events, ids, norm)?;
    let mut ws = LossWorkspace::default();
    Ok(loss_value(mlp, &prepared, norm, 0.0, None, None, &mut ws)?.data_loss)
}

/// Composite objective: data loss plus `lambda` times the mean squared
/// circuit residual (mean over the `n - 1` residual samples per event,
/// then over events). With `lambda = 0` this is bit-identical to
/// [`data_loss`].
pub fn composite_loss(
    mlp: &Mlp,
    norm: &Normalization,
    line: &LineParams,
    lambda: f64,
    events: &[DifferentialEvent],
    ids: &[EventId],
) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::argument(format!("lambda must be nonnegative, got {lambda}")));
    }
    let prepared = PreparedEvents::new(events, ids, norm)?;
    let mut ws = LossWorkspace::default();
    Ok(loss_value(mlp, &prepared, norm, lambda, Some(*line), None, &mut ws)?.loss)
}

/// Reusable buffers for repeated loss/gradient evaluations.
#[derive(Debug, Default)]
pub struct LossWorkspace {
    cache: BatchCache,
    yhat: Vec<f64>,
    dldy: Vec<f64>,
}

/// Result of one loss evaluation. `grad` is laid out as the flat MLP
/// gradient followed, in learnable mode, by the two theta gradients.
#[derive(Debug, Clone)]
pub struct LossValue {
    pub loss: f64,
    pub data_loss: f64,
    pub physics_term: f64,
    pub grad: Vec<f64>,
}

/// Evaluate the objective and its exact reverse-mode gradient.
///
/// `fixed_line` supplies (R, L) when they are constants; `learnable`
/// supplies the softplus parameterization when they are trained. With
/// `lambda = 0` the residual path is skipped entirely, which keeps the
/// evaluation bit-identical to the pure data loss.
pub fn loss_and_grad(
    mlp: &Mlp,
    prepared: &PreparedEvents,
    norm: &Normalization,
    lambda: f64,
    fixed_line: Option<LineParams>,
    learnable: Option<&LearnableLineParams>,
    ws: &mut LossWorkspace,
) -> Result<LossValue> {
    evaluate(mlp, prepared, norm, lambda, fixed_line, learnable, ws, true)
}

/// Objective value only; shares every accumulation with `loss_and_grad`
/// so both report identical numbers.
pub fn loss_value(
    mlp: &Mlp,
    prepared: &PreparedEvents,
    norm: &Normalization,
    lambda: f64,
    fixed_line: Option<LineParams>,
    learnable: Option<&LearnableLineParams>,
    ws: &mut LossWorkspace,
) -> Result<LossValue> {
    evaluate(mlp, prepared, norm, lambda, fixed_line, learnable, ws, false)
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    mlp: &Mlp,
    prepared: &PreparedEvents,
    norm: &Normalization,
    lambda: f64,
    fixed_line: Option<LineParams>,
    learnable: Option<&LearnableLineParams>,
    ws: &mut LossWorkspace,
    compute_grad: bool,
) -> Result<LossValue> {
    let n = prepared.n;
    let samples = prepared.sample_count();
    let events = prepared.count as f64;
    let grad_len = if compute_grad {
        mlp.param_count() + if learnable.is_some() { 2 } else { 0 }
    } else {
        0
    };

    mlp.forward_batch(&prepared.inputs, &mut ws.cache)?;
    ws.yhat.clear();
    ws.yhat
        .extend(ws.cache.outputs().iter().map(|o| o * norm.i1_std));
    ws.dldy.clear();
    ws.dldy.resize(if compute_grad { samples } else { 0 }, 0.0);

    // Data term and its per-sample gradient.
    let data_coef = 2.0 / (n as f64 * events);
    let mut data_sse = 0.0;
    for (s, (&y, &t)) in ws.yhat.iter().zip(&prepared.targets).enumerate() {
        let e = y - t;
        data_sse += e * e;
        if compute_grad {
            ws.dldy[s] = data_coef * e;
        }
    }
    let data_loss = data_sse / (n as f64 * events);

    let mut physics_term = 0.0;
    let mut grad = vec![0.0; grad_len];
    if lambda != 0.0 {
        let (r, l) = match (learnable, fixed_line) {
            (Some(p), _) => (p.resistance(), p.inductance()),
            (None, Some(line)) => (line.resistance, line.inductance),
            (None, None) => {
                return Err(Error::argument(
                    "composite loss needs fixed or learnable line parameters",
                ))
            }
        };
        let res_coef = 2.0 * lambda / ((n - 1) as f64 * events);
        let l_over_dt = l / prepared.dt;
        let mut res_sq = 0.0;
        let mut grad_r = 0.0;
        let mut grad_l = 0.0;
        for e in 0..prepared.count {
            let at = e * n;
            for i in 1..n {
                let (y, y_prev) = (ws.yhat[at + i], ws.yhat[at + i - 1]);
                let res = residual_at(
                    prepared.dv1[at + i],
                    prepared.dv2[at + i],
                    y,
                    y_prev,
                    r,
                    l,
                    prepared.dt,
                );
                res_sq += res * res;
                if compute_grad {
                    ws.dldy[at + i] += res_coef * res * (r + l_over_dt);
                    ws.dldy[at + i - 1] -= res_coef * res * l_over_dt;
                    if learnable.is_some() {
                        grad_r += res_coef * res * y;
                        grad_l += res_coef * res * (y - y_prev) / prepared.dt;
                    }
                }
            }
        }
        physics_term = lambda * res_sq / ((n - 1) as f64 * events);
        if compute_grad {
            if let Some(p) = learnable {
                let base = mlp.param_count();
                grad[base] = grad_r * p.resistance_grad();
                grad[base + 1] = grad_l * p.inductance_grad();
            }
        }
    }

    if compute_grad {
        // Chain through the de-standardization and into the network.
        for g in ws.dldy.iter_mut() {
            *g *= norm.i1_std;
        }
        mlp.backward_batch(
            &prepared.inputs,
            &ws.cache,
            &ws.dldy,
            &mut grad[..mlp.param_count()],
        )?;
    }

    Ok(LossValue {
        loss: data_loss + physics_term,
        data_loss,
        physics_term,
        grad,
    })
}

/// Data-fit MSE of the current model on prepared events (same event-mean
/// structure as the test metric).
pub fn mse_prepared(mlp: &Mlp, norm: &Normalization, prepared: &PreparedEvents, cache: &mut BatchCache) -> Result<f64> {
    mlp.forward_batch(&prepared.inputs, cache)?;
    let n = prepared.n;
    let mut total = 0.0;
    for e in 0..prepared.count {
        let at = e * n;
        let mut sse = 0.0;
        for i in 0..n {
            let y = cache.outputs()[at + i] * norm.i1_std;
            let err = y - prepared.targets[at + i];
            sse += err * err;
        }
        total += sse / n as f64;
    }
    Ok(total / prepared.count as f64)
}
