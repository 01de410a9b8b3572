use super::tensor::{log_sum_exp, sigmoid, softmax};
use crate::error::{Error, Result};

/// `-w[target] · log softmax(logits)[target]` and its gradient.
pub fn weighted_softmax_xent(logits: &[f64], target: usize, class_weights: &[f64]) -> Result<(f64, Vec<f64>)> {
    let c = logits.len();
    if target >= c {
        return Err(Error::TargetOutOfRange { target, classes: c });
    }
    if class_weights.len() != c {
        return Err(Error::Shape(format!("{} class weights for {c} classes", class_weights.len())));
    }
    let w = class_weights[target];
    let loss = w * (log_sum_exp(logits) - logits[target]);
    let mut grad = softmax(logits);
    grad[target] -= 1.0;
    grad.iter_mut().for_each(|g| *g *= w);
    Ok((loss, grad))
}

/// `log(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Sum of independent sigmoid cross-entropies, one per target flag.
pub fn binary_ova_xent(logits: &[f64], targets: &[bool]) -> (f64, Vec<f64>) {
    assert_eq!(logits.len(), targets.len(), "one logit per target");
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(logits.len());
    for (&z, &y) in logits.iter().zip(targets) {
        let y = f64::from(u8::from(y));
        loss += softplus(z) - y * z;
        grad.push(sigmoid(z) - y);
    }
    (loss, grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gradcheck::grad_check;
    use crate::numerics::rng::rng_from;
    use approx::assert_abs_diff_eq;
    use rand::Rng as _;

    #[test]
    fn softmax_xent_examples() {
        let (l, _) = weighted_softmax_xent(&[0.0; 3], 1, &[1.0; 3]).unwrap();
        assert_abs_diff_eq!(l, 3f64.ln(), epsilon = 1e-15);
        let (l, _) = weighted_softmax_xent(&[0.0, 1000.0, 0.0], 1, &[1.0; 3]).unwrap();
        assert!(l < 1e-12);
        // 2 * (ln(e + e^2 + e^3) - 1)
        let (l, _) = weighted_softmax_xent(&[1.0, 2.0, 3.0], 0, &[2.0, 1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(l, 4.815_211_928_888_76, epsilon = 1e-12);
        assert!(matches!(
            weighted_softmax_xent(&[0.0; 3], 3, &[1.0; 3]),
            Err(Error::TargetOutOfRange { target: 3, classes: 3 })
        ));
    }

    #[test]
    fn ova_examples() {
        let (l, _) = binary_ova_xent(&[0.0; 8], &[true, false, true, false, false, false, false, false]);
        assert_abs_diff_eq!(l, 8.0 * 2f64.ln(), epsilon = 1e-13);
        let (l, _) = binary_ova_xent(&[50.0, -50.0], &[true, false]);
        assert!(l < 1e-20);
        // softplus(1) - 1 + softplus(-2) + softplus(0.5)
        let (l, _) = binary_ova_xent(&[1.0, -2.0, 0.5], &[true, false, false]);
        assert_abs_diff_eq!(l, 1.414_266_682_741_302, epsilon = 1e-12);
    }

    #[test]
    fn weight_scales_loss() {
        let (a, _) = weighted_softmax_xent(&[0.3, -1.0, 2.0], 2, &[1.0; 3]).unwrap();
        let (b, _) = weighted_softmax_xent(&[0.3, -1.0, 2.0], 2, &[1.0, 1.0, 2.5]).unwrap();
        assert_abs_diff_eq!(b, 2.5 * a, epsilon = 1e-14);
    }

    #[test]
    fn gradients_match_finite_differences() {
        for trial in 0..20u64 {
            let mut rng = rng_from(trial);
            let c = 2 + trial as usize % 3;
            let z: Vec<f64> = (0..c).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let w: Vec<f64> = (0..c).map(|_| rng.gen_range(0.1..3.0)).collect();
            let t = rng.gen_range(0..c);
            let (_, g) = weighted_softmax_xent(&z, t, &w).unwrap();
            let err = grad_check(|x| weighted_softmax_xent(x, t, &w).unwrap().0, &z, &g, 1e-4);
            assert!(err < 1e-8, "{err}");

            let z8: Vec<f64> = (0..8).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let y: Vec<bool> = (0..8).map(|_| rng.gen()).collect();
            let (_, g) = binary_ova_xent(&z8, &y);
            assert!(grad_check(|x| binary_ova_xent(x, &y).0, &z8, &g, 1e-4) < 1e-8);
        }
    }
}
