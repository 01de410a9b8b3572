use serde::{Deserialize, Serialize};

use super::params::Parameters;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Moment estimates for one parameter set.
#[derive(Debug, Clone)]
pub struct AdamState<P: Parameters> {
    pub config: AdamConfig,
    pub m: P,
    pub v: P,
    pub step: u64,
}

impl<P: Parameters> AdamState<P> {
    pub fn new(params: &P, config: AdamConfig) -> Self {
        AdamState {
            config,
            m: params.zeros_like(),
            v: params.zeros_like(),
            step: 0,
        }
    }

    /// One bias-corrected update. Parameters are left untouched when any
    /// gradient is non-finite.
    pub fn step(&mut self, params: &mut P, grads: &P) -> Result<()> {
        if let Some(name) = grads.first_non_finite() {
            return Err(Error::NonFiniteGradient(name));
        }
        self.step += 1;
        let AdamConfig { lr, beta1, beta2, eps } = self.config;
        let t = self.step as i32;
        let c1 = 1.0 - beta1.powi(t);
        let c2 = 1.0 - beta2.powi(t);
        let g: Vec<_> = grads.named_params().into_iter().map(|(_, t)| t).collect();
        for (((p, g), m), v) in params
            .params_mut()
            .into_iter()
            .zip(g)
            .zip(self.m.params_mut())
            .zip(self.v.params_mut())
        {
            for (((pi, &gi), mi), vi) in p
                .data_mut()
                .iter_mut()
                .zip(g.data())
                .zip(m.data_mut())
                .zip(v.data_mut())
            {
                *mi = beta1 * *mi + (1.0 - beta1) * gi;
                *vi = beta2 * *vi + (1.0 - beta2) * gi * gi;
                *pi -= lr * (*mi / c1) / ((*vi / c2).sqrt() + eps);
            }
        }
        Ok(())
    }
}
