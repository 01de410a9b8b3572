use rand::distributions::{Distribution, Uniform};

use super::params::Parameters;
use super::rng::Rng;
use super::tensor::Tensor;

/// Affine map `y = W x + b`, `W` is `[out x in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub w: Tensor,
    pub b: Tensor,
}

impl Linear {
    pub fn zeros(d_in: usize, d_out: usize) -> Linear {
        Linear {
            w: Tensor::zeros(&[d_out, d_in]),
            b: Tensor::zeros(&[d_out]),
        }
    }

    /// Uniform(±1/√d_in) weights, zero bias.
    pub fn init(d_in: usize, d_out: usize, rng: &mut Rng) -> Linear {
        let mut l = Linear::zeros(d_in, d_out);
        let a = 1.0 / (d_in.max(1) as f64).sqrt();
        let u = Uniform::new_inclusive(-a, a);
        l.w.data_mut().iter_mut().for_each(|x| *x = u.sample(rng));
        l
    }

    pub fn d_in(&self) -> usize {
        self.w.cols()
    }

    pub fn d_out(&self) -> usize {
        self.w.rows()
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.b.data().to_vec();
        for (yi, row) in y.iter_mut().zip(self.w.row_iter()) {
            *yi += super::tensor::dot(row, x);
        }
        y
    }

    /// Accumulates parameter gradients into `grad` and returns `dL/dx`.
    pub fn backward(&self, x: &[f64], dy: &[f64], grad: &mut Linear) -> Vec<f64> {
        grad.w.outer_acc(dy, x);
        super::tensor::axpy(1.0, dy, grad.b.data_mut());
        let mut dx = vec![0.0; x.len()];
        self.w.matvec_t_acc(dy, &mut dx);
        dx
    }
}

impl Parameters for Linear {
    fn named_params(&self) -> Vec<(String, &Tensor)> {
        vec![("w".into(), &self.w), ("b".into(), &self.b)]
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        vec![&mut self.w, &mut self.b]
    }
}
