//! Losses and training procedures for the data-only and
//! physics-informed predictors.

mod checkpoint;
mod loss;
mod trainer;
mod verify;

pub use checkpoint::{
    load_checkpoint, read_training_log, save_checkpoint, write_training_log, Checkpoint,
};
pub use loss::{
    composite_loss, data_loss, loss_and_grad, loss_value, mse_prepared, physics_residual,
    predict_event, predict_events, LossValue, LossWorkspace, Normalization, PreparedEvents,
};
pub use trainer::{
    default_lambda_grid, select_lambda, train_data_only, train_piml_known, train_piml_unknown,
    LambdaSelection, TrainConfig, TrainLogRow, TrainMode, TrainedModel, TrajectoryPoint,
};
pub use verify::{run_gradient_check, GradCheckCase, GradCheckReport};
