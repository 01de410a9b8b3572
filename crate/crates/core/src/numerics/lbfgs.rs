//! Limited-memory BFGS with backtracking (Armijo) line search.

use super::tensor::{axpy, dot};

#[derive(Debug, Clone, Copy)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iter: usize,
    /// Stop when the largest gradient component falls below this.
    pub gtol: f64,
    /// Stop when the relative decrease of the objective falls below this.
    pub ftol: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        LbfgsOptions {
            memory: 10,
            max_iter: 500,
            gtol: 1e-6,
            ftol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LbfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn minimize<F>(mut f: F, x0: &[f64], opts: LbfgsOptions) -> LbfgsResult
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    let mut hist_s: Vec<Vec<f64>> = Vec::new();
    let mut hist_y: Vec<Vec<f64>> = Vec::new();
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));

    for iter in 0..opts.max_iter {
        if max_abs(&g) < opts.gtol {
            return LbfgsResult { x, value: fx, iterations: iter, converged: true };
        }
        let mut d = two_loop(&g, &hist_s, &hist_y);
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            hist_s.clear();
            hist_y.clear();
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut step = if hist_s.is_empty() { 1.0 / max_abs(&g).max(1.0) } else { 1.0 };
        let (x_new, f_new, g_new) = loop {
            let mut cand = x.clone();
            axpy(step, &d, &mut cand);
            let (fc, gc) = f(&cand);
            if fc.is_finite() && fc <= fx + 1e-4 * step * slope {
                break (cand, fc, gc);
            }
            step *= 0.5;
            if step < 1e-20 {
                return LbfgsResult { x, value: fx, iterations: iter, converged: false };
            }
        };
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        if dot(&s, &y) > 1e-12 {
            if hist_s.len() == opts.memory {
                hist_s.remove(0);
                hist_y.remove(0);
            }
            hist_s.push(s);
            hist_y.push(y);
        }
        let rel = (fx - f_new).abs() / fx.abs().max(f_new.abs()).max(1.0);
        x = x_new;
        fx = f_new;
        g = g_new;
        if rel < opts.ftol {
            return LbfgsResult { x, value: fx, iterations: iter + 1, converged: true };
        }
    }
    LbfgsResult { x, value: fx, iterations: opts.max_iter, converged: false }
}

/// Search direction `-H g` from the stored curvature pairs.
fn two_loop(g: &[f64], s: &[Vec<f64>], y: &[Vec<f64>]) -> Vec<f64> {
    let mut q = g.to_vec();
    let k = s.len();
    let mut alpha = vec![0.0; k];
    for i in (0..k).rev() {
        let rho = 1.0 / dot(&y[i], &s[i]);
        alpha[i] = rho * dot(&s[i], &q);
        axpy(-alpha[i], &y[i], &mut q);
    }
    if k > 0 {
        let gamma = dot(&s[k - 1], &y[k - 1]) / dot(&y[k - 1], &y[k - 1]);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for i in 0..k {
        let rho = 1.0 / dot(&y[i], &s[i]);
        let beta = rho * dot(&y[i], &q);
        axpy(alpha[i] - beta, &s[i], &mut q);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}
