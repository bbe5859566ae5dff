/// `|a - n| / max(1e-12, |a| + |n|)`
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1e-12)
}

/// Largest relative error between the analytic gradient returned by `f` at
/// `params` and central differences with step `eps` on every coordinate.
///
/// `f` maps a parameter vector to `(loss, gradient)`; only the loss is used at
/// the perturbed points. The loss may be reported relative to any fixed
/// offset, which lets callers evaluate it in higher precision and subtract the
/// base value before rounding to `f64`.
pub fn finite_diff_check<F>(f: F, params: &[f64], eps: f64) -> f64
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let (_, analytic) = f(params);
    assert_eq!(analytic.len(), params.len(), "gradient length mismatch");
    let mut probe = params.to_vec();
    let mut worst: f64 = 0.0;
    for i in 0..params.len() {
        let (up, down) = (params[i] + eps, params[i] - eps);
        probe[i] = up;
        let (plus, _) = f(&probe);
        probe[i] = down;
        let (minus, _) = f(&probe);
        probe[i] = params[i];
        // the representable step, not 2 * eps
        let numeric = (plus - minus) / (up - down);
        worst = worst.max(relative_error(analytic[i], numeric));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_linear_loss() {
        // dyadic values keep every product and sum exact
        let x = [0.375, -1.25, 2.5, 0.0];
        let f = |w: &[f64]| (w.iter().zip(&x).map(|(a, b)| a * b).sum(), x.to_vec());
        let eps = (2f64).powi(-20);
        assert!(finite_diff_check(f, &[1.0, 2.0, -3.0, 0.5], eps) < 1e-10);
    }

    #[test]
    fn detects_wrong_gradient() {
        let f = |w: &[f64]| (w[0] * w[0], vec![3.0 * w[0]]);
        assert!(finite_diff_check(f, &[1.0], 1e-6) > 0.1);
    }
}
