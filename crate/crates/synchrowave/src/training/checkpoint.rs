//! Model checkpoint file and training-log CSV.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::dataset::LineParamsRecord;
use crate::error::{Error, Result};
use crate::nn::{Mlp, MlpShape};
use crate::training::loss::Normalization;
use crate::training::trainer::{TrainLogRow, TrainedModel};

/// Checkpoint document: network shape, flat parameters, the input/target
/// scaling, and the learned line parameters when present.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub shape: Vec<usize>,
    pub parameters: Vec<f64>,
    pub normalization: Normalization,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learned_line_params: Option<LineParamsRecord>,
}

impl Checkpoint {
    pub fn from_trained(trained: &TrainedModel) -> Self {
        Self {
            shape: trained.model.shape().sizes().to_vec(),
            parameters: trained.model.params().to_vec(),
            normalization: trained.normalization,
            learned_line_params: trained.line_params.map(Into::into),
        }
    }

    pub fn into_model(self) -> Result<(Mlp, Normalization)> {
        let shape = MlpShape::new(self.shape)?;
        let mlp = Mlp::from_params(shape, self.parameters)?;
        Ok((mlp, self.normalization))
    }
}

pub fn save_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    crate::dataset::save_json(path, checkpoint)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Training-log CSV: one row per validation point, line-parameter
/// columns blank when the parameters are fixed.
pub fn write_training_log(path: &Path, rows: &[TrainLogRow]) -> Result<()> {
    let mut text = String::from("iteration,train_loss,val_mse,R_ohm,L_henry\n");
    for row in rows {
        let r = row.resistance.map(|v| v.to_string()).unwrap_or_default();
        let l = row.inductance.map(|v| v.to_string()).unwrap_or_default();
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            row.iteration, row.train_loss, row.val_mse, r, l
        ));
    }
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Parse a training log written by [`write_training_log`].
pub fn read_training_log(path: &Path) -> Result<Vec<TrainLogRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 || line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::structure(format!(
                "training log line {} has {} fields",
                idx + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| Error::structure(format!("bad number {s:?}: {e}")))
        };
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse(s).map(Some)
            }
        };
        rows.push(TrainLogRow {
            iteration: fields[0]
                .parse()
                .map_err(|e| Error::structure(format!("bad iteration: {e}")))?,
            train_loss: parse(fields[1])?,
            val_mse: parse(fields[2])?,
            resistance: opt(fields[3])?,
            inductance: opt(fields[4])?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Mlp, MlpShape};

    #[test]
    fn checkpoint_round_trip_preserves_parameters() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let mlp = Mlp::init(3, MlpShape::standard());
        let ckpt = Checkpoint {
            shape: mlp.shape().sizes().to_vec(),
            parameters: mlp.params().to_vec(),
            normalization: Normalization {
                v1_mean: 0.25,
                v1_std: 41.0,
                i1_std: 1.5,
            },
            learned_line_params: None,
        };
        save_checkpoint(&path, &ckpt).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(loaded.parameters, ckpt.parameters);
        let (model, norm) = loaded.into_model().unwrap();
        assert_eq!(model.params(), mlp.params());
        assert_eq!(norm, ckpt.normalization);
    }

    #[test]
    fn training_log_round_trips_with_blank_line_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.csv");
        let rows = vec![
            TrainLogRow {
                iteration: 0,
                train_loss: 1.5,
                val_mse: 2.25,
                resistance: None,
                inductance: None,
            },
            TrainLogRow {
                iteration: 100,
                train_loss: 0.75,
                val_mse: 1.125,
                resistance: Some(9.5),
                inductance: Some(2.0e-4),
            },
        ];
        write_training_log(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("iteration,train_loss,val_mse,R_ohm,L_henry\n"));
        assert!(text.contains("0,1.5,2.25,,\n"));
        let back = read_training_log(&path).unwrap();
        assert_eq!(back, rows);
    }
}
