//! Declarative configuration for the command-line pipeline.
//!
//! One JSON document configures generation, training, and sweeping.
//! Parsing is strict: unknown keys are rejected with the offending key
//! named, and every omitted field materializes to its default, so the
//! echoed effective configuration is always complete.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::sim::{DisturbanceConfig, GroundTruthIbr, LineParams};
use crate::sweep::SweepConfig;
use crate::training::TrainConfig;
use crate::waveform::SamplingConfig;

/// Sampling grid section: the event window is given in grid cycles and
/// expanded to `samples_per_event = samples_per_cycle * window_cycles`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingSection {
    pub samples_per_cycle: usize,
    pub grid_frequency: f64,
    pub window_cycles: usize,
}

impl Default for SamplingSection {
    fn default() -> Self {
        Self {
            samples_per_cycle: 128,
            grid_frequency: 60.0,
            window_cycles: 2,
        }
    }
}

impl SamplingSection {
    pub fn to_sampling(self) -> Result<SamplingConfig> {
        SamplingConfig::new(
            self.samples_per_cycle,
            self.grid_frequency,
            self.samples_per_cycle * self.window_cycles,
        )
    }

    pub fn at_rate(self, rate: usize) -> Result<SamplingConfig> {
        SamplingConfig::new(rate, self.grid_frequency, rate * self.window_cycles)
    }
}

/// Line parameters in explicit units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LineSection {
    pub r_ohm: f64,
    pub l_henry: f64,
}

impl Default for LineSection {
    fn default() -> Self {
        Self {
            r_ohm: 10.0,
            l_henry: 2.0e-4,
        }
    }
}

impl LineSection {
    pub fn to_line(self) -> Result<LineParams> {
        LineParams::new(self.r_ohm, self.l_henry)
    }
}

/// Input/output locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsSection {
    pub dataset_path: PathBuf,
    pub output_dir: PathBuf,
}

impl Default for PathsSection {
    fn default() -> Self {
        Self {
            dataset_path: PathBuf::from("dataset.json"),
            output_dir: PathBuf::from("results"),
        }
    }
}

/// The full configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct CliConfig {
    pub sampling: SamplingSection,
    pub disturbance: DisturbanceConfig,
    pub ibr: GroundTruthIbr,
    pub line: LineSection,
    pub train: TrainConfig,
    pub sweep: SweepConfig,
    pub paths: PathsSection,
}

impl CliConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: CliConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.sampling.to_sampling()?;
        self.disturbance.validate()?;
        self.ibr.validate()?;
        self.line.to_line()?;
        self.train.validate()?;
        self.sweep.validate()?;
        Ok(())
    }

    /// Pretty-printed echo of the fully materialized configuration.
    pub fn to_pretty_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serializes");
        text.push('\n');
        text
    }

    /// Dataset file location for one sampling rate: the configured path
    /// with the rate inserted before the extension
    /// (`events.json` -> `events.128.json`).
    pub fn dataset_path_for_rate(&self, rate: usize) -> PathBuf {
        let path = &self.paths.dataset_path;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string());
        let ext = path
            .extension()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "json".to_string());
        path.with_file_name(format!("{stem}.{rate}.{ext}"))
    }
}

pub(crate) fn seed_key_present(text: &str, section: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(text)
        .ok()
        .and_then(|v| v.get(section).and_then(|s| s.get("seed")).cloned())
        .is_some()
}

/// Seed precedence: command-line flag, then an explicit config-file key,
/// then the `SYNCHROWAVE_SEED` environment variable, then the built-in
/// default.
pub fn resolve_seed(
    flag: Option<u64>,
    config_text: Option<&str>,
    section: &str,
    config_value: u64,
) -> u64 {
    if let Some(s) = flag {
        return s;
    }
    if let Some(text) = config_text {
        if seed_key_present(text, section) {
            return config_value;
        }
    }
    if let Ok(env) = std::env::var("SYNCHROWAVE_SEED") {
        if let Ok(s) = env.parse() {
            return s;
        }
    }
    config_value
}
