//! Softplus positivity map and the learnable line-parameter wrapper.

use crate::error::{Error, Result};

/// Overflow-safe softplus, `ln(1 + exp(x))`.
///
/// For `x > 30` the linear asymptote is returned directly; for `x < -30`
/// the exponential tail `exp(x)` is returned. In between, the evaluation
/// uses `ln_1p` on the side that cannot overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else if x < -30.0 {
        x.exp()
    } else if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Inverse of [`softplus`]: the `x` with `softplus(x) = y`, for `y > 0`.
pub fn inverse_softplus(y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::argument(format!(
            "inverse_softplus requires y > 0, got {y}"
        )));
    }
    if y > 30.0 {
        Ok(y)
    } else {
        Ok(y.exp_m1().ln())
    }
}

/// Derivative of softplus, the logistic sigmoid.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Line resistance and inductance expressed through unconstrained
/// parameters, `R = softplus(theta_r) * r_scale` and
/// `L = softplus(theta_l) * l_scale`, so both stay strictly positive
/// during gradient-based training.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnableLineParams {
    pub theta_r: f64,
    pub theta_l: f64,
    /// Ohms per softplus unit.
    pub r_scale: f64,
    /// Henries per softplus unit.
    pub l_scale: f64,
}

impl LearnableLineParams {
    /// Scale putting resistance in ohms at O(1) optimizer magnitude.
    pub const R_SCALE: f64 = 1.0;
    /// Scale putting inductance in millihenries at O(1) optimizer magnitude.
    pub const L_SCALE: f64 = 1.0e-3;

    /// Construct from initial physical values (ohms, henries).
    pub fn from_initial(r_ohm: f64, l_henry: f64) -> Result<Self> {
        Ok(Self {
            theta_r: inverse_softplus(r_ohm / Self::R_SCALE)?,
            theta_l: inverse_softplus(l_henry / Self::L_SCALE)?,
            r_scale: Self::R_SCALE,
            l_scale: Self::L_SCALE,
        })
    }

    /// Default initialization: 5 ohms and 1 millihenry, deliberately away
    /// from any plausible truth so convergence is visible in trajectories.
    pub fn initial() -> Self {
        Self::from_initial(5.0, 1.0e-3).expect("positive initial values")
    }

    pub fn resistance(&self) -> f64 {
        softplus(self.theta_r) * self.r_scale
    }

    pub fn inductance(&self) -> f64 {
        softplus(self.theta_l) * self.l_scale
    }

    /// d(resistance)/d(theta_r).
    pub fn resistance_grad(&self) -> f64 {
        sigmoid(self.theta_r) * self.r_scale
    }

    /// d(inductance)/d(theta_l).
    pub fn inductance_grad(&self) -> f64 {
        sigmoid(self.theta_l) * self.l_scale
    }
}
