//! Gradient verification of the training losses on randomized fixtures.
//!
//! Builds a small synthetic batch and a randomly initialized model, then
//! compares the analytic reverse-mode gradient of the selected objective
//! against central finite differences, coordinate by coordinate.
//!
//! The fixture centers targets and grid-side voltages on the model's own
//! initial predictions, leaving only small random misfits. That keeps
//! the objective value - and with it the cancellation noise of each
//! finite-difference quotient, which scales with `ulp(loss)/epsilon` -
//! several orders of magnitude below the per-coordinate gradient scale,
//! so the relative-error comparison measures the gradient code rather
//! than f64 rounding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cell::RefCell;

use crate::error::Result;
use crate::nn::{
    central_difference_gradient, relative_error, LearnableLineParams, Mlp, MlpShape,
};
use crate::sim::LineParams;
use crate::training::loss::{
    loss_and_grad, loss_value, predict_event, LossWorkspace, Normalization, PreparedEvents,
};
use crate::waveform::{DifferentialEvent, SamplingConfig};

/// Outcome of one gradient check.
#[derive(Debug, Clone, Copy)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    pub parameter_count: usize,
}

/// Configuration of a single check.
#[derive(Debug, Clone, Copy)]
pub struct GradCheckCase {
    pub seed: u64,
    pub lambda: f64,
    /// Learn (R, L) through softplus instead of holding them fixed.
    pub learnable_line: bool,
    pub epsilon: f64,
    /// Test hook: corrupt one analytic gradient coordinate so the check
    /// must fail.
    pub sabotage: bool,
}

impl Default for GradCheckCase {
    fn default() -> Self {
        Self {
            seed: 0,
            lambda: 0.3,
            learnable_line: false,
            epsilon: 1e-5,
            sabotage: false,
        }
    }
}

const FIXTURE_EVENTS: u32 = 2;
const MISFIT_STD: f64 = 5e-3;

fn fixture_norm() -> Normalization {
    Normalization {
        v1_mean: 0.0,
        v1_std: 1.0,
        i1_std: 0.1,
    }
}

/// Random batch of two events, 32 samples each at 8 samples per cycle.
/// Targets sit near the model's initial predictions and the grid-side
/// voltage near circuit consistency at the evaluation-point (R, L), with
/// small Gaussian misfits on top.
fn fixture_events(
    seed: u64,
    model: &Mlp,
    resistance: f64,
    inductance: f64,
) -> Vec<DifferentialEvent> {
    let sampling = SamplingConfig::new(8, 60.0, 32).expect("valid fixture sampling");
    let norm = fixture_norm();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f17e_0000_0001);
    let mut gauss = move || {
        let u1: f64 = rng.gen::<f64>().max(1e-300);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    (1..=FIXTURE_EVENTS)
        .map(|id| {
            let n = sampling.samples_per_event;
            let dv1: Vec<f64> = (0..n).map(|_| gauss()).collect();
            let mut event = DifferentialEvent {
                event_id: id,
                dv1,
                dv2: vec![0.0; n],
                di1: vec![0.0; n],
                sampling,
            };
            let y0 = predict_event(model, &norm, &event);
            event.di1 = y0.iter().map(|y| y + MISFIT_STD * gauss()).collect();
            event.dv2 = (0..n)
                .map(|l| {
                    let prev = if l == 0 { y0[l] } else { y0[l - 1] };
                    event.dv1[l]
                        - resistance * y0[l]
                        - inductance * (y0[l] - prev) / sampling.dt
                        + MISFIT_STD * gauss()
                })
                .collect();
            event
        })
        .collect()
}

/// Run one gradient check and report the maximum per-coordinate relative
/// error between the analytic and central-difference gradients.
pub fn run_gradient_check(case: &GradCheckCase) -> Result<GradCheckReport> {
    let mlp = Mlp::init(case.seed, MlpShape::standard());
    let fixed_line = (!case.learnable_line).then(LineParams::default);
    let learnable_init = LearnableLineParams::initial();
    let (r_eval, l_eval) = if case.learnable_line {
        (learnable_init.resistance(), learnable_init.inductance())
    } else {
        let line = fixed_line.unwrap();
        (line.resistance, line.inductance)
    };

    let events = fixture_events(case.seed, &mlp, r_eval, l_eval);
    let ids = [1u32, 2];
    let norm = fixture_norm();
    let prepared = PreparedEvents::new(&events, &ids, &norm)?;

    let mut point = mlp.params().to_vec();
    if case.learnable_line {
        point.push(learnable_init.theta_r);
        point.push(learnable_init.theta_l);
    }

    let mlp_len = mlp.param_count();
    let scratch_model = RefCell::new(mlp.clone());
    let scratch_ws = RefCell::new(LossWorkspace::default());
    let loss_at = |p: &[f64]| -> f64 {
        let mut model = scratch_model.borrow_mut();
        model.set_params(&p[..mlp_len]);
        let learn = case.learnable_line.then(|| LearnableLineParams {
            theta_r: p[mlp_len],
            theta_l: p[mlp_len + 1],
            ..learnable_init
        });
        loss_value(
            &model,
            &prepared,
            &norm,
            case.lambda,
            fixed_line,
            learn.as_ref(),
            &mut scratch_ws.borrow_mut(),
        )
        .expect("loss evaluation")
        .loss
    };

    let mut ws = LossWorkspace::default();
    let mut analytic = loss_and_grad(
        &mlp,
        &prepared,
        &norm,
        case.lambda,
        fixed_line,
        case.learnable_line.then_some(&learnable_init),
        &mut ws,
    )?
    .grad;
    if case.sabotage {
        analytic[0] += 1e-3;
    }

    let numeric = central_difference_gradient(loss_at, &point, case.epsilon);
    let max_relative_error = analytic
        .iter()
        .zip(&numeric)
        .map(|(&a, &n)| relative_error(a, n))
        .fold(0.0, f64::max);
    Ok(GradCheckReport {
        max_relative_error,
        parameter_count: point.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_only_gradients_match_finite_differences() {
        let report = run_gradient_check(&GradCheckCase {
            seed: 3,
            lambda: 0.0,
            ..GradCheckCase::default()
        })
        .unwrap();
        assert!(report.max_relative_error < 1e-4, "{report:?}");
    }

    #[test]
    fn composite_gradients_match_finite_differences() {
        for learnable in [false, true] {
            let report = run_gradient_check(&GradCheckCase {
                seed: 4,
                lambda: 0.3,
                learnable_line: learnable,
                ..GradCheckCase::default()
            })
            .unwrap();
            assert!(
                report.max_relative_error < 1e-4,
                "learnable={learnable}: {report:?}"
            );
        }
    }

    #[test]
    fn sabotage_hook_forces_failure() {
        let report = run_gradient_check(&GradCheckCase {
            seed: 5,
            sabotage: true,
            ..GradCheckCase::default()
        })
        .unwrap();
        assert!(report.max_relative_error >= 1e-4);
    }

    #[test]
    fn learnable_thetas_are_checked_too() {
        let report = run_gradient_check(&GradCheckCase {
            seed: 6,
            lambda: 3.0,
            learnable_line: true,
            ..GradCheckCase::default()
        })
        .unwrap();
        assert_eq!(report.parameter_count, MlpShape::standard().param_count() + 2);
        assert!(report.max_relative_error < 1e-4, "{report:?}");
    }
}
