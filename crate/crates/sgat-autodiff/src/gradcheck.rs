//! Gradient checking against central finite differences.

/// Central-difference gradient of `f` at `x` with the given step.
pub fn finite_difference(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x: &[f64],
    step: f64,
) -> Vec<f64> {
    let mut probe = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let orig = probe[i];
        probe[i] = orig + step;
        let plus = f(&probe);
        probe[i] = orig - step;
        let minus = f(&probe);
        probe[i] = orig;
        out.push((plus - minus) / (2.0 * step));
    }
    out
}

/// Max over coordinates of |analytic - numeric| / (|analytic| + 1e-8).
pub fn max_rel_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len(), "gradient length mismatch");
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / (a.abs() + 1e-8))
        .fold(0.0, f64::max)
}

/// Convenience: compares the analytic gradient of a scalar function of a flat
/// parameter vector against central differences at step 1e-6.
pub fn grad_check(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x: &[f64],
    analytic: &[f64],
) -> f64 {
    let numeric = finite_difference(f, x, 1e-6);
    max_rel_error(analytic, &numeric)
}
