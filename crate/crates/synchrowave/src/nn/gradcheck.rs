//! Central-difference gradient verification.

/// Numerical gradient of `loss` at `params` via central differences,
/// one coordinate at a time.
pub fn central_difference_gradient<F>(loss: F, params: &[f64], epsilon: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut point = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        let original = point[i];
        point[i] = original + epsilon;
        let plus = loss(&point);
        point[i] = original - epsilon;
        let minus = loss(&point);
        point[i] = original;
        grad.push((plus - minus) / (2.0 * epsilon));
    }
    grad
}

/// Per-coordinate relative error, `|a - f| / max(1e-12, |a| + |f|)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / f64::max(1e-12, analytic.abs() + numeric.abs())
}

/// Maximum relative error between an analytic gradient and the
/// central-difference gradient of `loss` at `params`.
pub fn max_relative_error<F>(loss: F, params: &[f64], analytic: &[f64], epsilon: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    assert_eq!(params.len(), analytic.len());
    let numeric = central_difference_gradient(loss, params, epsilon);
    analytic
        .iter()
        .zip(&numeric)
        .map(|(&a, &n)| relative_error(a, n))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_loss_on_linear_model_is_exact() {
        // loss(p) = (3p - 1)^2; gradient 6(3p - 1). Central differences
        // are exact for quadratics up to rounding.
        let loss = |p: &[f64]| (3.0 * p[0] - 1.0) * (3.0 * p[0] - 1.0);
        let params = [0.4];
        let analytic = [6.0 * (3.0 * params[0] - 1.0)];
        let err = max_relative_error(loss, &params, &analytic, 1e-5);
        assert!(err < 1e-10, "err = {err}");
    }

    #[test]
    fn error_shrinks_quadratically_with_epsilon() {
        // A loss with a large third derivative so truncation dominates.
        let loss = |p: &[f64]| (3.0 * p[0]).sin().powi(2) + p[0].exp();
        let params = [0.7f64];
        let analytic =
            [3.0 * 2.0 * (3.0 * params[0]).sin() * (3.0 * params[0]).cos() + params[0].exp()];
        let coarse = max_relative_error(loss, &params, &analytic, 1e-3);
        let fine = max_relative_error(loss, &params, &analytic, 1e-5);
        assert!(coarse > fine, "coarse {coarse} vs fine {fine}");
        let ratio = coarse / fine.max(1e-300);
        assert!(
            (1e2..=1e6).contains(&ratio),
            "second-order convergence expected, ratio {ratio}"
        );
    }

    #[test]
    fn relative_error_floor_guards_zero_gradients() {
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        assert!(relative_error(1e-13, -1e-13) <= 0.2000001);
    }
}
