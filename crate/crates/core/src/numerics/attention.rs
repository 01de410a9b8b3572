use super::tensor::{axpy, dot, softmax, Tensor};
use crate::error::{Error, Result};

/// Cached forward pass of scaled dot-product attention.
#[derive(Debug, Clone)]
pub struct AttentionTrace {
    pub weights: Vec<f64>,
    pub output: Vec<f64>,
}

/// `softmax(q · Kᵀ / √d) · V` for a single query.
pub fn attention_forward(query: &[f64], keys: &Tensor, values: &Tensor) -> Result<AttentionTrace> {
    let n = keys.rows();
    if n == 0 {
        return Err(Error::NoAttentionTargets);
    }
    let d = query.len();
    if keys.cols() != d || values.rows() != n {
        return Err(Error::Shape(format!(
            "attention: query {d}, keys {:?}, values {:?}",
            keys.shape(),
            values.shape()
        )));
    }
    let scale = 1.0 / (d as f64).sqrt();
    let scores: Vec<f64> = keys.row_iter().map(|k| dot(query, k) * scale).collect();
    let weights = softmax(&scores);
    let mut output = vec![0.0; values.cols()];
    for (a, v) in weights.iter().zip(values.row_iter()) {
        axpy(*a, v, &mut output);
    }
    Ok(AttentionTrace { weights, output })
}

pub fn scaled_dot_attention(query: &Tensor, keys: &Tensor, values: &Tensor) -> Result<Tensor> {
    Ok(Tensor::vector(attention_forward(query.data(), keys, values)?.output))
}

pub struct AttentionGrads {
    pub dquery: Vec<f64>,
    pub dkeys: Tensor,
    pub dvalues: Tensor,
}

pub fn attention_backward(
    query: &[f64],
    keys: &Tensor,
    values: &Tensor,
    trace: &AttentionTrace,
    d_out: &[f64],
) -> AttentionGrads {
    let scale = 1.0 / (query.len() as f64).sqrt();
    let a = &trace.weights;
    let da: Vec<f64> = values.row_iter().map(|v| dot(d_out, v)).collect();
    let mean: f64 = a.iter().zip(&da).map(|(x, y)| x * y).sum();
    let ds: Vec<f64> = a.iter().zip(&da).map(|(ai, dai)| ai * (dai - mean)).collect();

    let mut dquery = vec![0.0; query.len()];
    let mut dkeys = Tensor::zeros(keys.shape());
    let mut dvalues = Tensor::zeros(values.shape());
    for (j, k) in keys.row_iter().enumerate() {
        axpy(ds[j] * scale, k, &mut dquery);
        axpy(ds[j] * scale, query, dkeys.row_mut(j));
        axpy(a[j], d_out, dvalues.row_mut(j));
    }
    AttentionGrads { dquery, dkeys, dvalues }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gradcheck::grad_check;
    use crate::numerics::rng::rng_from;
    use approx::assert_abs_diff_eq;
    use rand::Rng as _;

    fn t(rows: &[&[f64]]) -> Tensor {
        Tensor::from_rows(rows).unwrap()
    }

    #[test]
    fn identical_keys_average_values() {
        let k = t(&[&[1.0, 2.0], &[1.0, 2.0], &[1.0, 2.0]]);
        let v = t(&[&[3.0, 0.0], &[0.0, 3.0], &[6.0, 6.0]]);
        let out = attention_forward(&[0.4, -1.0], &k, &v).unwrap();
        assert_abs_diff_eq!(out.output[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.output[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn aligned_large_key_dominates() {
        let k = t(&[&[0.0, 1.0], &[100.0, 0.0]]);
        let v = t(&[&[1.0, 1.0], &[-5.0, 7.0]]);
        let out = attention_forward(&[1.0, 0.0], &k, &v).unwrap();
        assert_abs_diff_eq!(out.output[0], -5.0, epsilon = 1e-9);
        assert_abs_diff_eq!(out.output[1], 7.0, epsilon = 1e-9);
    }

    #[test]
    fn two_by_three_fixture() {
        // q = (1, 0, 1), K = [[1,0,0],[0,0,1]] scaled by 1/√3: equal scores.
        // Shift second key to (0,0,2): scores 1/√3 and 2/√3.
        let q = [1.0, 0.0, 1.0];
        let k = t(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 2.0]]);
        let v = t(&[&[1.0, 2.0, 3.0], &[-1.0, 0.0, 1.0]]);
        let out = attention_forward(&q, &k, &v).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let (e1, e2) = (s.exp(), (2.0 * s).exp());
        let (a1, a2) = (e1 / (e1 + e2), e2 / (e1 + e2));
        let want = [a1 - a2, 2.0 * a1, 3.0 * a1 + a2];
        for (o, w) in out.output.iter().zip(want) {
            assert_abs_diff_eq!(*o, w, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(out.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn no_targets_is_an_error() {
        let err = attention_forward(&[1.0], &Tensor::zeros(&[0, 1]), &Tensor::zeros(&[0, 1])).unwrap_err();
        assert_eq!(err.to_string(), "no attention targets");
    }

    #[test]
    fn permutation_equivariant() {
        let k = t(&[&[0.1, 0.2], &[0.5, -0.3], &[1.0, 1.0]]);
        let v = t(&[&[1.0, 0.0], &[0.0, 1.0], &[2.0, 2.0]]);
        let kp = t(&[&[1.0, 1.0], &[0.1, 0.2], &[0.5, -0.3]]);
        let vp = t(&[&[2.0, 2.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let a = attention_forward(&[0.3, 0.7], &k, &v).unwrap().output;
        let b = attention_forward(&[0.3, 0.7], &kp, &vp).unwrap().output;
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-14);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        for trial in 0..20u64 {
            let mut rng = rng_from(trial);
            let (n, d) = (1 + trial as usize % 4, 3);
            let mut r = |len: usize| -> Vec<f64> { (0..len).map(|_| rng.gen_range(-1.5..1.5)).collect() };
            let q = r(d);
            let kd = r(n * d);
            let vd = r(n * d);
            let u = r(d);
            let f = |q: &[f64], kd: &[f64], vd: &[f64]| {
                let k = Tensor::from_vec(&[n, d], kd.to_vec()).unwrap();
                let v = Tensor::from_vec(&[n, d], vd.to_vec()).unwrap();
                dot(&attention_forward(q, &k, &v).unwrap().output, &u)
            };
            let k = Tensor::from_vec(&[n, d], kd.clone()).unwrap();
            let v = Tensor::from_vec(&[n, d], vd.clone()).unwrap();
            let tr = attention_forward(&q, &k, &v).unwrap();
            let g = attention_backward(&q, &k, &v, &tr, &u);
            assert!(grad_check(|x| f(x, &kd, &vd), &q, &g.dquery, 1e-4) < 1e-7);
            assert!(grad_check(|x| f(&q, x, &vd), &kd, g.dkeys.data(), 1e-4) < 1e-7);
            assert!(grad_check(|x| f(&q, &kd, x), &vd, g.dvalues.data(), 1e-4) < 1e-7);
        }
    }
}
