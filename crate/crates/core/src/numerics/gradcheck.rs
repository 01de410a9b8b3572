/// Maximum over coordinates of `|analytic - numeric| / max(1, |numeric|)`,
/// with `numeric` from central differences of step `h`.
pub fn grad_check<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64], analytic: &[f64], h: f64) -> f64 {
    assert_eq!(x.len(), analytic.len(), "one analytic derivative per input");
    let mut probe = x.to_vec();
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        let numeric = (up - down) / (2.0 * h);
        let err = (analytic[i] - numeric).abs() / numeric.abs().max(1.0);
        worst = worst.max(err);
    }
    worst
}
