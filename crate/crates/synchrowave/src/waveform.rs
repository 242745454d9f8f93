//! Waveform domain types, the one-cycle differential transform, event
//! splitting, and the test metric.
//!
//! A disturbance event is a window of `n` voltage/current samples
//! starting at the disturbance onset, preceded by one full grid cycle of
//! pre-onset history. The differential transform subtracts the sample one
//! cycle earlier, `dx[l] = x[l] - x[l - N]`, which cancels the periodic
//! steady state and leaves only the disturbance signature.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Identifier of one disturbance event, 1-based within a dataset.
pub type EventId = u32;

/// Sampling grid shared by every event in a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// Samples per grid cycle, `N` (128, 64, or 32 in the studies here).
    pub samples_per_cycle: usize,
    /// Nominal grid frequency in hertz.
    pub grid_frequency: f64,
    /// Sampling interval in seconds, `1 / (N * grid_frequency)`.
    pub dt: f64,
    /// Samples per event window, `n`.
    pub samples_per_event: usize,
}

impl SamplingConfig {
    pub fn new(
        samples_per_cycle: usize,
        grid_frequency: f64,
        samples_per_event: usize,
    ) -> Result<Self> {
        if samples_per_cycle == 0 {
            return Err(Error::argument("samples_per_cycle must be positive"));
        }
        if !(grid_frequency > 0.0) {
            return Err(Error::argument("grid_frequency must be positive"));
        }
        if samples_per_event < 2 * samples_per_cycle {
            return Err(Error::argument(format!(
                "samples_per_event {} must be at least two cycles ({})",
                samples_per_event,
                2 * samples_per_cycle
            )));
        }
        let dt = 1.0 / (samples_per_cycle as f64 * grid_frequency);
        Ok(Self {
            samples_per_cycle,
            grid_frequency,
            dt,
            samples_per_event,
        })
    }

    /// Standard 60 Hz grid with an event window of `cycles` grid cycles.
    pub fn sixty_hz(samples_per_cycle: usize, cycles: usize) -> Result<Self> {
        Self::new(samples_per_cycle, 60.0, samples_per_cycle * cycles)
    }

    /// Validate a deserialized value (the stored `dt` must match the
    /// derived one to within 1e-15).
    pub fn validate(&self) -> Result<()> {
        let fresh = Self::new(
            self.samples_per_cycle,
            self.grid_frequency,
            self.samples_per_event,
        )?;
        if (self.dt - fresh.dt).abs() >= 1e-15 {
            return Err(Error::structure(format!(
                "dt {} inconsistent with 1/(N*f) = {}",
                self.dt, fresh.dt
            )));
        }
        Ok(())
    }
}

/// Per-channel raw samples of one disturbance event, including one cycle
/// of pre-onset history so the differential transform is defined at
/// every in-window index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformEvent {
    pub event_id: EventId,
    /// Absolute sample index of the disturbance onset in the source
    /// recording; kept as metadata only.
    pub onset_index: u64,
    /// Exactly `N` samples per channel immediately preceding the onset.
    pub pre_history: ChannelSet,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub i1: Vec<f64>,
}

/// The three measured channels of the circuit: IBR terminal voltage,
/// grid-side voltage, IBR terminal current.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub i1: Vec<f64>,
}

/// One event converted to differential measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialEvent {
    pub event_id: EventId,
    pub dv1: Vec<f64>,
    pub dv2: Vec<f64>,
    pub di1: Vec<f64>,
    pub sampling: SamplingConfig,
}

impl DifferentialEvent {
    pub fn len(&self) -> usize {
        self.dv1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dv1.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dv1.len();
        if self.dv2.len() != n || self.di1.len() != n {
            return Err(Error::structure(format!(
                "event {}: channel lengths differ ({}, {}, {})",
                self.event_id,
                n,
                self.dv2.len(),
                self.di1.len()
            )));
        }
        for (name, chan) in [("dv1", &self.dv1), ("dv2", &self.dv2), ("di1", &self.di1)] {
            if let Some(idx) = chan.iter().position(|x| !x.is_finite()) {
                return Err(Error::data(format!(
                    "event {}: non-finite sample in channel {name} at index {idx}",
                    self.event_id
                )));
            }
        }
        Ok(())
    }
}

/// Disjoint train/validation/test event ids. Stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train_ids: Vec<EventId>,
    pub val_ids: Vec<EventId>,
    pub test_ids: Vec<EventId>,
}

/// One-cycle differential transform of a raw event.
///
/// For every channel and every in-window index `l`,
/// `dx[l] = x[l] - x[l - N]`, where negative indices read from the
/// stored pre-history.
pub fn differential(event: &WaveformEvent, sampling: &SamplingConfig) -> Result<DifferentialEvent> {
    let n_cycle = sampling.samples_per_cycle;
    let channels = [
        ("v1", &event.v1, &event.pre_history.v1),
        ("v2", &event.v2, &event.pre_history.v2),
        ("i1", &event.i1, &event.pre_history.i1),
    ];
    let n = event.v1.len();
    for (name, samples, pre) in &channels {
        if samples.len() != n {
            return Err(Error::structure(format!(
                "event {}: channel {name} has {} samples, expected {n}",
                event.event_id,
                samples.len()
            )));
        }
        if pre.len() != n_cycle {
            return Err(Error::structure(format!(
                "event {}: channel {name} pre-history has {} samples, expected {n_cycle}",
                event.event_id,
                pre.len()
            )));
        }
        for (idx, x) in samples.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::data(format!(
                    "event {}: non-finite sample in channel {name} at index {idx}",
                    event.event_id
                )));
            }
        }
        for (idx, x) in pre.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::data(format!(
                    "event {}: non-finite pre-history sample in channel {name} at index {idx}",
                    event.event_id
                )));
            }
        }
    }

    let diff_channel = |samples: &[f64], pre: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|l| {
                let previous = if l < n_cycle {
                    pre[l]
                } else {
                    samples[l - n_cycle]
                };
                samples[l] - previous
            })
            .collect()
    };

    Ok(DifferentialEvent {
        event_id: event.event_id,
        dv1: diff_channel(&event.v1, &event.pre_history.v1),
        dv2: diff_channel(&event.v2, &event.pre_history.v2),
        di1: diff_channel(&event.i1, &event.pre_history.i1),
        sampling: *sampling,
    })
}

/// Deterministic split of event ids `1..=p` into train/validation/test.
///
/// The validation and test sets depend only on `(p, val_count,
/// test_count, seed)`, and training sets grow nested in `train_count`:
/// both properties come from drawing a single seeded permutation and
/// carving it as `[val | test | train...]`.
pub fn split_events(
    p: usize,
    train_count: usize,
    val_count: usize,
    test_count: usize,
    seed: u64,
) -> Result<DatasetSplit> {
    if train_count + val_count + test_count > p {
        return Err(Error::argument(format!(
            "split {train_count}+{val_count}+{test_count} exceeds event count {p}"
        )));
    }
    let mut perm: Vec<EventId> = (1..=p as EventId).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perm.shuffle(&mut rng);

    let mut val_ids: Vec<EventId> = perm[..val_count].to_vec();
    let mut test_ids: Vec<EventId> = perm[val_count..val_count + test_count].to_vec();
    let mut train_ids: Vec<EventId> =
        perm[val_count + test_count..val_count + test_count + train_count].to_vec();
    val_ids.sort_unstable();
    test_ids.sort_unstable();
    train_ids.sort_unstable();
    Ok(DatasetSplit {
        train_ids,
        val_ids,
        test_ids,
    })
}

/// Mean-squared error of predicted differential currents over the listed
/// events: mean over events of the per-event sample average of squared
/// errors, in amperes squared.
pub fn test_mse(
    predictions: &BTreeMap<EventId, Vec<f64>>,
    truth: &[DifferentialEvent],
    ids: &[EventId],
) -> Result<f64> {
    if ids.is_empty() {
        return Err(Error::argument("test_mse over an empty id set"));
    }
    let by_id: BTreeMap<EventId, &DifferentialEvent> =
        truth.iter().map(|e| (e.event_id, e)).collect();
    // Iterate ids in sorted order so the accumulated sum does not depend
    // on caller ordering.
    let mut sorted: Vec<EventId> = ids.to_vec();
    sorted.sort_unstable();
    let mut total = 0.0;
    for id in &sorted {
        let event = by_id
            .get(id)
            .ok_or_else(|| Error::argument(format!("no truth event with id {id}")))?;
        let pred = predictions
            .get(id)
            .ok_or_else(|| Error::argument(format!("no prediction for event {id}")))?;
        if pred.len() != event.di1.len() {
            return Err(Error::argument(format!(
                "event {id}: prediction length {} does not match {}",
                pred.len(),
                event.di1.len()
            )));
        }
        let sse: f64 = pred
            .iter()
            .zip(&event.di1)
            .map(|(p, t)| (p - t) * (p - t))
            .sum();
        total += sse / event.di1.len() as f64;
    }
    Ok(total / sorted.len() as f64)
}
