use rand::Rng as _;

use super::rng::Rng;

/// Inverted-dropout mask: each entry is 0 with probability `rate`,
/// otherwise `1 / (1 - rate)`.
pub fn dropout_mask(n: usize, rate: f64, rng: &mut Rng) -> Vec<f64> {
    assert!((0.0..1.0).contains(&rate), "dropout rate must be in [0, 1)");
    if rate == 0.0 {
        return vec![1.0; n];
    }
    let keep = 1.0 / (1.0 - rate);
    (0..n)
        .map(|_| if rng.gen::<f64>() < rate { 0.0 } else { keep })
        .collect()
}

pub fn apply_mask(x: &[f64], mask: &[f64]) -> Vec<f64> {
    x.iter().zip(mask).map(|(a, m)| a * m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::rng_from;

    #[test]
    fn expectation_is_identity() {
        let x = [0.7, -1.2, 3.0];
        let mut rng = rng_from(11);
        let n = 10_000;
        let mut sum = [0.0; 3];
        for _ in 0..n {
            let y = apply_mask(&x, &dropout_mask(3, 0.5, &mut rng));
            for k in 0..3 {
                sum[k] += y[k];
            }
        }
        for k in 0..3 {
            let mean = sum[k] / n as f64;
            // each draw is 0 or 2x: standard deviation |x|
            let sigma = x[k].abs() / (n as f64).sqrt();
            assert!((mean - x[k]).abs() < 3.0 * sigma, "{k}: {mean}");
        }
    }
}
