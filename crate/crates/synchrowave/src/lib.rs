//! Physics-informed learning of inverter-based-resource transient
//! current from synchro-waveform disturbance events.
//!
//! A grid-connected inverter is monitored by waveform sensors on both
//! ends of an RL line. From a handful of recorded disturbances, this
//! crate learns the map from the differential terminal voltage to the
//! differential terminal current, and compares a data-only neural model
//! against a physics-informed one whose loss penalizes violations of the
//! discrete circuit equation. When the line parameters are unknown they
//! are identified jointly with the response map through a softplus
//! reparameterization.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! - **`generate_dataset`** - synthesize a circuit-consistent disturbance
//!   dataset and write it to JSON
//! - **`differential_transform`** - raw waveforms to differential
//!   signatures, and why the steady state cancels
//! - **`gradient_check`** - verify reverse-mode gradients of both losses
//!   against central finite differences
//! - **`train_data_only`** - the purely data-driven baseline
//! - **`train_physics_informed`** - composite loss with known line
//!   parameters, compared against the baseline on a shared split
//! - **`identify_line_params`** - joint estimation of the response map
//!   and (R, L), with the convergence trajectory
//! - **`select_lambda`** - validation-driven choice of the physics weight
//! - **`data_efficiency`** - interpolated-crossing ratio between two
//!   error curves
//! - **`mini_sweep`** - a small end-to-end sweep producing the CSV/SVG
//!   report tree
//!
//! ```text
//! cargo run --release -p synchrowave --example train_physics_informed
//! ```
//!
//! The `synchrowave` binary exposes the same pipeline as subcommands:
//! `generate`, `train`, `sweep`, `report`, and `gradcheck`.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod nn;
pub mod sim;
pub mod sweep;
pub mod training;
pub mod waveform;

pub use error::{Error, Result};
pub use sim::{DisturbanceConfig, GroundTruthIbr, LineParams};
pub use waveform::{DatasetSplit, DifferentialEvent, EventId, SamplingConfig, WaveformEvent};
