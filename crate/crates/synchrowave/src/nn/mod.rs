//! Minimal neural-network stack: a tanh MLP with exact reverse-mode
//! gradients, an Adam optimizer, the softplus positivity map for
//! learnable line parameters, and a finite-difference gradient checker.

mod adam;
mod gradcheck;
mod mlp;
mod softplus;

pub use adam::{AdamConfig, AdamState};
pub use gradcheck::{central_difference_gradient, max_relative_error, relative_error};
pub use mlp::{BatchCache, Mlp, MlpShape};
pub use softplus::{inverse_softplus, sigmoid, softplus, LearnableLineParams};
