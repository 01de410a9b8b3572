//! Unidirectional and bidirectional LSTMs with explicit backpropagation
//! through time. Gate order inside `w` and `b` is input, forget, cell,
//! output.

use rand::distributions::{Distribution, Uniform};

use super::params::{prefixed, Parameters};
use super::rng::Rng;
use super::tensor::{axpy, sigmoid, Tensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    /// `[4H x (d_in + H)]`, acting on `[x_t; h_{t-1}]`.
    pub w: Tensor,
    pub b: Tensor,
}

impl LstmParams {
    pub fn zeros(d_in: usize, hidden: usize) -> LstmParams {
        LstmParams {
            w: Tensor::zeros(&[4 * hidden, d_in + hidden]),
            b: Tensor::zeros(&[4 * hidden]),
        }
    }

    /// Uniform(±1/√H) weights, zero biases except the forget gate at 1.
    pub fn init(d_in: usize, hidden: usize, rng: &mut Rng) -> LstmParams {
        let mut p = LstmParams::zeros(d_in, hidden);
        let a = 1.0 / (hidden as f64).sqrt();
        let u = Uniform::new_inclusive(-a, a);
        p.w.data_mut().iter_mut().for_each(|x| *x = u.sample(rng));
        p.b.data_mut()[hidden..2 * hidden].iter_mut().for_each(|x| *x = 1.0);
        p
    }

    pub fn hidden(&self) -> usize {
        self.b.len() / 4
    }

    pub fn d_in(&self) -> usize {
        self.w.cols() - self.hidden()
    }
}

impl Parameters for LstmParams {
    fn named_params(&self) -> Vec<(String, &Tensor)> {
        vec![("w".into(), &self.w), ("b".into(), &self.b)]
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        vec![&mut self.w, &mut self.b]
    }
}

#[derive(Debug, Clone)]
struct Step {
    z: Vec<f64>,
    i: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    o: Vec<f64>,
    c_prev: Vec<f64>,
    tanh_c: Vec<f64>,
}

/// Forward-pass cache needed by [`lstm_backward`].
#[derive(Debug, Clone)]
pub struct LstmTrace {
    steps: Vec<Step>,
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

/// Runs the LSTM over `xs` in the given order from state `(h0, c0)`.
pub fn lstm_forward<X: AsRef<[f64]>>(
    p: &LstmParams,
    xs: &[X],
    h0: &[f64],
    c0: &[f64],
) -> Result<LstmTrace> {
    if xs.is_empty() {
        return Err(Error::EmptySequence);
    }
    let hd = p.hidden();
    let d = p.d_in();
    if h0.len() != hd || c0.len() != hd {
        return Err(Error::Shape(format!("initial state must have {hd} values")));
    }
    let mut h = h0.to_vec();
    let mut c = c0.to_vec();
    let mut steps = Vec::with_capacity(xs.len());
    let mut a = vec![0.0; 4 * hd];
    for x in xs {
        let x = x.as_ref();
        if x.len() != d {
            return Err(Error::Shape(format!("input has {} values, expected {d}", x.len())));
        }
        let mut z = Vec::with_capacity(d + hd);
        z.extend_from_slice(x);
        z.extend_from_slice(&h);
        p.w.matvec(&z, &mut a);
        axpy(1.0, p.b.data(), &mut a);
        let i: Vec<f64> = a[..hd].iter().map(|&v| sigmoid(v)).collect();
        let f: Vec<f64> = a[hd..2 * hd].iter().map(|&v| sigmoid(v)).collect();
        let g: Vec<f64> = a[2 * hd..3 * hd].iter().map(|v| v.tanh()).collect();
        let o: Vec<f64> = a[3 * hd..].iter().map(|&v| sigmoid(v)).collect();
        let c_prev = c.clone();
        for k in 0..hd {
            c[k] = f[k] * c_prev[k] + i[k] * g[k];
        }
        let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
        for k in 0..hd {
            h[k] = o[k] * tanh_c[k];
        }
        steps.push(Step { z, i, f, g, o, c_prev, tanh_c });
    }
    Ok(LstmTrace { steps, h, c })
}

/// Gradients of a trace given upstream gradients on the final `(h, c)`.
pub struct LstmGrads {
    pub params: LstmParams,
    /// Per-input gradients, in the order the inputs were consumed.
    pub dxs: Vec<Vec<f64>>,
    pub dh0: Vec<f64>,
    pub dc0: Vec<f64>,
}

pub fn lstm_backward(p: &LstmParams, trace: &LstmTrace, dh_last: &[f64], dc_last: &[f64]) -> LstmGrads {
    let hd = p.hidden();
    let d = p.d_in();
    let mut grads = p.zeros_like();
    let mut dxs = vec![Vec::new(); trace.steps.len()];
    let mut dh = dh_last.to_vec();
    let mut dc = dc_last.to_vec();
    let mut da = vec![0.0; 4 * hd];
    for (t, s) in trace.steps.iter().enumerate().rev() {
        for k in 0..hd {
            let d_o = dh[k] * s.tanh_c[k];
            let dck = dc[k] + dh[k] * s.o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]);
            let di = dck * s.g[k];
            let dg = dck * s.i[k];
            let df = dck * s.c_prev[k];
            dc[k] = dck * s.f[k];
            da[k] = di * s.i[k] * (1.0 - s.i[k]);
            da[hd + k] = df * s.f[k] * (1.0 - s.f[k]);
            da[2 * hd + k] = dg * (1.0 - s.g[k] * s.g[k]);
            da[3 * hd + k] = d_o * s.o[k] * (1.0 - s.o[k]);
        }
        grads.w.outer_acc(&da, &s.z);
        axpy(1.0, &da, grads.b.data_mut());
        let mut dz = vec![0.0; d + hd];
        p.w.matvec_t_acc(&da, &mut dz);
        dh = dz.split_off(d);
        dxs[t] = dz;
    }
    LstmGrads {
        params: grads,
        dxs,
        dh0: dh,
        dc0: dc,
    }
}

/// Forward and backward LSTMs; the encoding is `[h_fwd_T; h_bwd_1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiLstmParams {
    pub fwd: LstmParams,
    pub bwd: LstmParams,
}

impl BiLstmParams {
    pub fn zeros(d_in: usize, hidden: usize) -> BiLstmParams {
        BiLstmParams {
            fwd: LstmParams::zeros(d_in, hidden),
            bwd: LstmParams::zeros(d_in, hidden),
        }
    }

    pub fn init(d_in: usize, hidden: usize, rng: &mut Rng) -> BiLstmParams {
        let fwd = LstmParams::init(d_in, hidden, rng);
        let bwd = LstmParams::init(d_in, hidden, rng);
        BiLstmParams { fwd, bwd }
    }

    pub fn hidden(&self) -> usize {
        self.fwd.hidden()
    }

    pub fn d_in(&self) -> usize {
        self.fwd.d_in()
    }

    pub fn output_dim(&self) -> usize {
        2 * self.hidden()
    }
}

impl Parameters for BiLstmParams {
    fn named_params(&self) -> Vec<(String, &Tensor)> {
        let mut v = prefixed("fwd", self.fwd.named_params());
        v.extend(prefixed("bwd", self.bwd.named_params()));
        v
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut v = self.fwd.params_mut();
        v.extend(self.bwd.params_mut());
        v
    }
}

/// Initial cell states for the two directions; hidden states start at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BiState {
    pub c_fwd: Vec<f64>,
    pub c_bwd: Vec<f64>,
}

pub struct BiLstmTrace {
    pub fwd: LstmTrace,
    pub bwd: LstmTrace,
}

impl BiLstmTrace {
    pub fn output(&self) -> Vec<f64> {
        let mut out = self.fwd.h.clone();
        out.extend_from_slice(&self.bwd.h);
        out
    }

    pub fn final_cells(&self) -> BiState {
        BiState {
            c_fwd: self.fwd.c.clone(),
            c_bwd: self.bwd.c.clone(),
        }
    }
}

pub fn bilstm_forward<X: AsRef<[f64]>>(
    p: &BiLstmParams,
    xs: &[X],
    init: Option<&BiState>,
) -> Result<BiLstmTrace> {
    let hd = p.hidden();
    let zero = vec![0.0; hd];
    let (cf, cb) = match init {
        Some(s) => (s.c_fwd.as_slice(), s.c_bwd.as_slice()),
        None => (zero.as_slice(), zero.as_slice()),
    };
    let fwd = lstm_forward(&p.fwd, xs, &zero, cf)?;
    let rev: Vec<&[f64]> = xs.iter().rev().map(|x| x.as_ref()).collect();
    let bwd = lstm_forward(&p.bwd, &rev, &zero, cb)?;
    Ok(BiLstmTrace { fwd, bwd })
}

pub struct BiLstmGrads {
    pub params: BiLstmParams,
    /// Gradient for each input position, in sequence order.
    pub dxs: Vec<Vec<f64>>,
    pub dinit: BiState,
}

/// Backpropagates `d_out` (length 2H, on the encoding) and optional
/// gradients on the final cell states.
pub fn bilstm_backward(
    p: &BiLstmParams,
    trace: &BiLstmTrace,
    d_out: &[f64],
    d_cells: Option<&BiState>,
) -> BiLstmGrads {
    let hd = p.hidden();
    let zero = vec![0.0; hd];
    let (dcf, dcb) = match d_cells {
        Some(s) => (s.c_fwd.as_slice(), s.c_bwd.as_slice()),
        None => (zero.as_slice(), zero.as_slice()),
    };
    let gf = lstm_backward(&p.fwd, &trace.fwd, &d_out[..hd], dcf);
    let gb = lstm_backward(&p.bwd, &trace.bwd, &d_out[hd..], dcb);
    let mut dxs = gf.dxs;
    for (dx, db) in dxs.iter_mut().zip(gb.dxs.iter().rev()) {
        axpy(1.0, db, dx);
    }
    BiLstmGrads {
        params: BiLstmParams {
            fwd: gf.params,
            bwd: gb.params,
        },
        dxs,
        dinit: BiState {
            c_fwd: gf.dc0,
            c_bwd: gb.dc0,
        },
    }
}

/// Encodes a `[T x d_in]` sequence into the concatenated final states.
pub fn bilstm_encode(seq: &Tensor, p: &BiLstmParams) -> Result<Tensor> {
    if seq.rows() == 0 {
        return Err(Error::EmptySequence);
    }
    let rows: Vec<&[f64]> = seq.row_iter().collect();
    Ok(Tensor::vector(bilstm_forward(p, &rows, None)?.output()))
}
