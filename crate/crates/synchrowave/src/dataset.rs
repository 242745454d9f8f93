//! Dataset file formats.
//!
//! Both raw and differential datasets are single JSON documents. A raw
//! dataset stores `v1`/`v2`/`i1` channels plus one cycle of pre-onset
//! history per event; a differential dataset stores `dv1`/`dv2`/`di1`
//! with no pre-history. `line_params_truth` is optional and records the
//! generating line parameters when the data is synthetic.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::LineParams;
use crate::waveform::{ChannelSet, DifferentialEvent, EventId, SamplingConfig, WaveformEvent};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineParamsRecord {
    #[serde(rename = "R_ohm")]
    pub r_ohm: f64,
    #[serde(rename = "L_henry")]
    pub l_henry: f64,
}

impl From<LineParams> for LineParamsRecord {
    fn from(p: LineParams) -> Self {
        Self {
            r_ohm: p.resistance,
            l_henry: p.inductance,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawEventRecord {
    pub event_id: EventId,
    #[serde(default)]
    pub onset_index: u64,
    pub pre_history: ChannelSet,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub i1: Vec<f64>,
}

/// Raw dataset document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawDataset {
    pub format_version: u32,
    pub sampling: SamplingConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line_params_truth: Option<LineParamsRecord>,
    pub events: Vec<RawEventRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DifferentialEventRecord {
    pub event_id: EventId,
    pub dv1: Vec<f64>,
    pub dv2: Vec<f64>,
    pub di1: Vec<f64>,
}

/// Differential dataset document: what training and evaluation consume.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DifferentialDataset {
    pub format_version: u32,
    pub sampling: SamplingConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line_params_truth: Option<LineParamsRecord>,
    pub events: Vec<DifferentialEventRecord>,
}

impl RawDataset {
    pub fn into_events(self) -> Vec<WaveformEvent> {
        self.events
            .into_iter()
            .map(|e| WaveformEvent {
                event_id: e.event_id,
                onset_index: e.onset_index,
                pre_history: e.pre_history,
                v1: e.v1,
                v2: e.v2,
                i1: e.i1,
            })
            .collect()
    }

    pub fn from_events(
        sampling: SamplingConfig,
        line_params_truth: Option<LineParams>,
        events: Vec<WaveformEvent>,
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            sampling,
            line_params_truth: line_params_truth.map(Into::into),
            events: events
                .into_iter()
                .map(|e| RawEventRecord {
                    event_id: e.event_id,
                    onset_index: e.onset_index,
                    pre_history: e.pre_history,
                    v1: e.v1,
                    v2: e.v2,
                    i1: e.i1,
                })
                .collect(),
        }
    }
}

impl DifferentialDataset {
    pub fn from_events(
        sampling: SamplingConfig,
        line_params_truth: Option<LineParams>,
        events: &[DifferentialEvent],
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            sampling,
            line_params_truth: line_params_truth.map(Into::into),
            events: events
                .iter()
                .map(|e| DifferentialEventRecord {
                    event_id: e.event_id,
                    dv1: e.dv1.clone(),
                    dv2: e.dv2.clone(),
                    di1: e.di1.clone(),
                })
                .collect(),
        }
    }

    /// Convert to in-memory events, validating lengths and finiteness.
    pub fn into_events(self) -> Result<Vec<DifferentialEvent>> {
        self.sampling.validate()?;
        let n = self.sampling.samples_per_event;
        let events: Vec<DifferentialEvent> = self
            .events
            .into_iter()
            .map(|e| DifferentialEvent {
                event_id: e.event_id,
                dv1: e.dv1,
                dv2: e.dv2,
                di1: e.di1,
                sampling: self.sampling,
            })
            .collect();
        for event in &events {
            event.validate()?;
            if event.len() != n {
                return Err(Error::structure(format!(
                    "event {}: length {} does not match sampling window {n}",
                    event.event_id,
                    event.len()
                )));
            }
        }
        Ok(events)
    }

    pub fn truth_line_params(&self) -> Option<LineParams> {
        self.line_params_truth.as_ref().map(|r| LineParams {
            resistance: r.r_ohm,
            inductance: r.l_henry,
        })
    }
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_raw_dataset(path: &Path) -> Result<RawDataset> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn load_differential_dataset(path: &Path) -> Result<DifferentialDataset> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveform::SamplingConfig;

    fn tiny_dataset() -> DifferentialDataset {
        let sampling = SamplingConfig::sixty_hz(2, 2).unwrap();
        DifferentialDataset {
            format_version: FORMAT_VERSION,
            sampling,
            line_params_truth: Some(LineParamsRecord {
                r_ohm: 10.0,
                l_henry: 2.0e-4,
            }),
            events: vec![DifferentialEventRecord {
                event_id: 1,
                dv1: vec![0.1, -0.25, 0.5, 1.0 / 3.0],
                dv2: vec![0.0; 4],
                di1: vec![0.0; 4],
            }],
        }
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.json");
        let ds = tiny_dataset();
        save_json(&path, &ds).unwrap();
        let first = std::fs::read(&path).unwrap();
        let loaded = load_differential_dataset(&path).unwrap();
        save_json(&path, &loaded).unwrap();
        let second = std::fs::read(&path).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn mismatched_lengths_rejected_on_load() {
        let mut ds = tiny_dataset();
        ds.events[0].di1.pop();
        let err = ds.into_events().unwrap_err();
        assert!(matches!(err, Error::Structure(_)), "{err}");
    }

    #[test]
    fn non_finite_values_rejected_on_load() {
        let mut ds = tiny_dataset();
        ds.events[0].dv2[1] = f64::INFINITY;
        let err = ds.into_events().unwrap_err();
        assert!(matches!(err, Error::Data(_)), "{err}");
    }
}
