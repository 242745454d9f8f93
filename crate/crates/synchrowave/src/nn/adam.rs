//! Bias-corrected Adam over a flat parameter vector.

use crate::error::{Error, Result};

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Optimizer state: first/second moment estimates aligned with the
/// parameter vector, plus the step counter used for bias correction.
#[derive(Debug, Clone)]
pub struct AdamState {
    config: AdamConfig,
    first_moment: Vec<f64>,
    second_moment: Vec<f64>,
    step_count: u64,
}

impl AdamState {
    pub fn new(dim: usize, config: AdamConfig) -> Self {
        Self {
            config,
            first_moment: vec![0.0; dim],
            second_moment: vec![0.0; dim],
            step_count: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// One in-place update. Increments the step counter by exactly one.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.first_moment.len() || grads.len() != params.len() {
            return Err(Error::argument(format!(
                "adam dimensions disagree: params {}, grads {}, state {}",
                params.len(),
                grads.len(),
                self.first_moment.len()
            )));
        }
        self.step_count += 1;
        let c = &self.config;
        let bc1 = 1.0 - c.beta1.powi(self.step_count as i32);
        let bc2 = 1.0 - c.beta2.powi(self.step_count as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.first_moment[i] = c.beta1 * self.first_moment[i] + (1.0 - c.beta1) * g;
            self.second_moment[i] = c.beta2 * self.second_moment[i] + (1.0 - c.beta2) * g * g;
            let m_hat = self.first_moment[i] / bc1;
            let v_hat = self.second_moment[i] / bc2;
            params[i] -= c.learning_rate * m_hat / (v_hat.sqrt() + c.epsilon);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut state = AdamState::new(3, AdamConfig::default());
        let mut params = vec![1.0, -2.0, 0.5];
        let before = params.clone();
        state.step(&mut params, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(params, before);
        assert_eq!(state.step_count(), 1);
    }

    #[test]
    fn first_step_moves_by_learning_rate_times_sign() {
        let cfg = AdamConfig::default();
        let mut state = AdamState::new(2, cfg);
        let mut params = vec![0.0, 0.0];
        state.step(&mut params, &[0.3, -7.0]).unwrap();
        // Bias correction makes m_hat / sqrt(v_hat) = sign(g) up to epsilon.
        assert!((params[0] + cfg.learning_rate).abs() < 1e-9);
        assert!((params[1] - cfg.learning_rate).abs() < 1e-9);
    }

    #[test]
    fn constant_gradient_moves_monotonically() {
        // Hand trace on one parameter, g = 1 throughout:
        //   step 1: m=0.1, v=0.001, m_hat=1, v_hat=1       -> p -= lr
        //   step 2: m=0.19, v=0.001999, both corrections
        //           cancel again                            -> p -= lr
        let cfg = AdamConfig::default();
        let mut state = AdamState::new(1, cfg);
        let mut params = vec![0.0];
        state.step(&mut params, &[1.0]).unwrap();
        let after_one = params[0];
        state.step(&mut params, &[1.0]).unwrap();
        let after_two = params[0];
        assert!(after_one < 0.0);
        assert!(after_two < after_one);
        assert!((after_one + cfg.learning_rate).abs() < 1e-9);
        assert!((after_two + 2.0 * cfg.learning_rate).abs() < 1e-8);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let mut state = AdamState::new(2, AdamConfig::default());
        let mut params = vec![0.0, 0.0];
        assert!(state.step(&mut params, &[1.0]).is_err());
    }
}
