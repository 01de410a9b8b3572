//! Finite-difference checks of every differentiable operation, runnable
//! outside the unit tests.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::Serialize;

use crate::aspect::{Aspect, EmotionSet, Label, Polarity, Pos};
use crate::encoder::config::Variant;
use crate::encoder::data::{EncoderInput, Example};
use crate::encoder::model::{joint_loss, joint_loss_grad, ConnotationModel, LossSpec};
use crate::numerics::attention::{attention_backward, attention_forward};
use crate::numerics::gradcheck::grad_check;
use crate::numerics::loss::{binary_ova_xent, weighted_softmax_xent};
use crate::numerics::lstm::{bilstm_backward, bilstm_forward, lstm_backward, lstm_forward, BiLstmParams, BiState, LstmParams};
use crate::numerics::rng::{derive_seed, rng_from, tag, Rng};
use crate::numerics::tensor::dot;
use crate::numerics::{Linear, Parameters, Tensor};
use crate::stance::model::{BicModel, StanceInput};
use crate::stance::StanceLabel;

pub const OPERATIONS: [&str; 8] = [
    "linear",
    "lstm",
    "bilstm",
    "attention",
    "weighted_softmax_xent",
    "binary_ova_xent",
    "joint_loss_ce_r",
    "bic_loss",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheckRow {
    pub operation: String,
    pub instances: usize,
    pub max_rel_error: f64,
}

fn vecr(rng: &mut Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn rows(rng: &mut Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| vecr(rng, d)).collect()
}

/// Largest relative error over the parameters and inputs of one random
/// instance of `op`.
pub fn check_instance(op: &str, rng: &mut Rng, h: f64) -> f64 {
    match op {
        "linear" => {
            let l = Linear::init(3, 2, rng);
            let x = vecr(rng, 3);
            let u = vecr(rng, 2);
            let mut g = l.zeros_like();
            let dx = l.backward(&x, &u, &mut g);
            let mut probe = l.clone();
            let ep = grad_check(
                |w| {
                    probe.set_flat(w);
                    dot(&probe.forward(&x), &u)
                },
                &l.flatten(),
                &g.flatten(),
                h,
            );
            ep.max(grad_check(|x| dot(&l.forward(x), &u), &x, &dx, h))
        }
        "lstm" => {
            let (d, hd) = (3, 2);
            let p = LstmParams::init(d, hd, rng);
            let t = rng.gen_range(1..5);
            let xs = rows(rng, t, d);
            let (h0, c0) = (vecr(rng, hd), vecr(rng, hd));
            let (uh, uc) = (vecr(rng, hd), vecr(rng, hd));
            let loss = |p: &LstmParams, xs: &[Vec<f64>], h0: &[f64], c0: &[f64]| {
                let tr = lstm_forward(p, xs, h0, c0).expect("valid shapes");
                dot(&tr.h, &uh) + dot(&tr.c, &uc)
            };
            let g = lstm_backward(&p, &lstm_forward(&p, &xs, &h0, &c0).expect("valid shapes"), &uh, &uc);
            let mut probe = p.clone();
            let e1 = grad_check(
                |w| {
                    probe.set_flat(w);
                    loss(&probe, &xs, &h0, &c0)
                },
                &p.flatten(),
                &g.params.flatten(),
                h,
            );
            let e2 = grad_check(
                |f| loss(&p, &f.chunks(d).map(<[f64]>::to_vec).collect::<Vec<_>>(), &h0, &c0),
                &xs.concat(),
                &g.dxs.concat(),
                h,
            );
            let e3 = grad_check(|s| loss(&p, &xs, s, &c0), &h0, &g.dh0, h);
            let e4 = grad_check(|s| loss(&p, &xs, &h0, s), &c0, &g.dc0, h);
            e1.max(e2).max(e3).max(e4)
        }
        "bilstm" => {
            let (d, hd) = (3, 2);
            let p = BiLstmParams::init(d, hd, rng);
            let t = rng.gen_range(1..5);
            let xs = rows(rng, t, d);
            let init = BiState { c_fwd: vecr(rng, hd), c_bwd: vecr(rng, hd) };
            let u = vecr(rng, 4 * hd);
            let loss = |p: &BiLstmParams, xs: &[Vec<f64>], s: &BiState| {
                let tr = bilstm_forward(p, xs, Some(s)).expect("valid shapes");
                let c = tr.final_cells();
                dot(&tr.output(), &u[..2 * hd]) + dot(&c.c_fwd, &u[2 * hd..3 * hd]) + dot(&c.c_bwd, &u[3 * hd..])
            };
            let tr = bilstm_forward(&p, &xs, Some(&init)).expect("valid shapes");
            let dcells = BiState { c_fwd: u[2 * hd..3 * hd].to_vec(), c_bwd: u[3 * hd..].to_vec() };
            let g = bilstm_backward(&p, &tr, &u[..2 * hd], Some(&dcells));
            let mut probe = p.clone();
            let e1 = grad_check(
                |w| {
                    probe.set_flat(w);
                    loss(&probe, &xs, &init)
                },
                &p.flatten(),
                &g.params.flatten(),
                h,
            );
            let e2 = grad_check(
                |f| loss(&p, &f.chunks(d).map(<[f64]>::to_vec).collect::<Vec<_>>(), &init),
                &xs.concat(),
                &g.dxs.concat(),
                h,
            );
            let e3 = grad_check(
                |f| loss(&p, &xs, &BiState { c_fwd: f[..hd].to_vec(), c_bwd: f[hd..].to_vec() }),
                &[init.c_fwd.clone(), init.c_bwd.clone()].concat(),
                &[g.dinit.c_fwd, g.dinit.c_bwd].concat(),
                h,
            );
            e1.max(e2).max(e3)
        }
        "attention" => {
            let (n, d) = (rng.gen_range(1..5), 3);
            let q = vecr(rng, d);
            let kd = vecr(rng, n * d);
            let vd = vecr(rng, n * d);
            let u = vecr(rng, d);
            let t = |x: &[f64]| Tensor::from_vec(&[n, d], x.to_vec()).expect("n x d");
            let f = |q: &[f64], k: &[f64], v: &[f64]| dot(&attention_forward(q, &t(k), &t(v)).expect("keys").output, &u);
            let (k, v) = (t(&kd), t(&vd));
            let tr = attention_forward(&q, &k, &v).expect("keys");
            let g = attention_backward(&q, &k, &v, &tr, &u);
            let e1 = grad_check(|x| f(x, &kd, &vd), &q, &g.dquery, h);
            let e2 = grad_check(|x| f(&q, x, &vd), &kd, g.dkeys.data(), h);
            let e3 = grad_check(|x| f(&q, &kd, x), &vd, g.dvalues.data(), h);
            e1.max(e2).max(e3)
        }
        "weighted_softmax_xent" => {
            let c = rng.gen_range(2..5);
            let z: Vec<f64> = (0..c).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let w: Vec<f64> = (0..c).map(|_| rng.gen_range(0.1..3.0)).collect();
            let target = rng.gen_range(0..c);
            let (_, g) = weighted_softmax_xent(&z, target, &w).expect("target in range");
            grad_check(|x| weighted_softmax_xent(x, target, &w).expect("target in range").0, &z, &g, h)
        }
        "binary_ova_xent" => {
            let z: Vec<f64> = (0..8).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let y: Vec<bool> = (0..8).map(|_| rng.gen()).collect();
            let (_, g) = binary_ova_xent(&z, &y);
            grad_check(|x| binary_ova_xent(x, &y).0, &z, &g, h)
        }
        "joint_loss_ce_r" => {
            let aspects = [Aspect::Sentiment, Aspect::Emotion, Aspect::PerspWriterTheme, Aspect::Power];
            let d = 4;
            let m = ConnotationModel::new(Variant::CeR, d, 2, &aspects, rng).expect("2H = d");
            let batch = vec![encoder_example(rng, Pos::Noun, d), encoder_example(rng, Pos::Verb, d)];
            let spec = LossSpec {
                lambda: aspects.iter().map(|a| (*a, a.default_loss_weight())).collect(),
                class_weights: BTreeMap::from([(Aspect::Sentiment, vec![0.5, 1.0, 2.0])]),
            };
            let (_, g) = joint_loss_grad(&m, &batch, &spec).expect("labeled batch");
            let mut probe = m.clone();
            grad_check(
                |w| {
                    probe.set_flat(w);
                    joint_loss(&probe, &batch, &spec).expect("labeled batch")
                },
                &m.flatten(),
                &g.flatten(),
                h,
            )
        }
        "bic_loss" => {
            let d_att = if rng.gen() { Some(3) } else { None };
            let m = BicModel::new(3, 2, d_att, rng);
            let (nt, nx, nk) = (rng.gen_range(1..3), rng.gen_range(1..4), rng.gen_range(0..4));
            let x = StanceInput { topic: rows(rng, nt, 3), text: rows(rng, nx, 3), keys: rows(rng, nk, 3) };
            let label = StanceLabel::from_index(rng.gen_range(0..3)).expect("three labels");
            let mask: Vec<f64> = (0..m.feature_dim()).map(|_| if rng.gen_bool(0.25) { 0.0 } else { 2.0 }).collect();
            let mut g = m.zeros_like();
            m.example_loss(&x, label, Some(&mask), Some((&mut g, 1.0))).expect("valid input");
            let mut probe = m.clone();
            grad_check(
                |w| {
                    probe.set_flat(w);
                    probe.example_loss(&x, label, Some(&mask), None).expect("valid input")
                },
                &m.flatten(),
                &g.flatten(),
                h,
            )
        }
        _ => panic!("unknown operation `{op}`"),
    }
}

fn encoder_example(rng: &mut Rng, pos: Pos, d: usize) -> Example {
    let t = rng.gen_range(1..4);
    let r = rng.gen_range(1..3);
    let input = EncoderInput {
        word: "w".into(),
        pos,
        tokens: rows(rng, t, d),
        related: rows(rng, r, d),
        pretrained: Some(vecr(rng, d)),
    };
    let labels = if pos == Pos::Verb {
        BTreeMap::from([
            (Aspect::PerspWriterTheme, Label::Polar(Polarity::Negative)),
            (Aspect::Power, Label::FourWay(rng.gen_range(0..4))),
        ])
    } else {
        BTreeMap::from([
            (Aspect::Sentiment, Label::Polar(Polarity::Positive)),
            (Aspect::Emotion, Label::Emotions(EmotionSet::from_names(["joy", "trust"]).expect("known emotions"))),
        ])
    };
    Example { input, labels }
}

/// `instances` random instances of every operation; each operation draws
/// from its own stream of `seed`.
pub fn gradient_suite(instances: usize, seed: u64, h: f64) -> Vec<GradCheckRow> {
    use rayon::prelude::*;
    OPERATIONS
        .par_iter()
        .map(|op| {
            let mut rng = rng_from(derive_seed(seed, tag(op)));
            let worst = (0..instances).map(|_| check_instance(op, &mut rng, h)).fold(0.0, f64::max);
            GradCheckRow { operation: op.to_string(), instances, max_rel_error: worst }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_tightly() {
        let rows = gradient_suite(5, 3, 1e-4);
        assert_eq!(rows.len(), OPERATIONS.len());
        for r in &rows {
            assert!(r.max_rel_error < 1e-6, "{r:?}");
        }
    }
}
