use std::collections::BTreeMap;

use super::config::Variant;
use super::data::{EncoderInput, Example};
use crate::aspect::{Aspect, EmotionSet, Label};
use crate::error::{Error, Result};
use crate::numerics::attention::{attention_backward, attention_forward, AttentionTrace};
use crate::numerics::dropout::apply_mask;
use crate::numerics::lstm::{bilstm_backward, bilstm_forward, BiLstmTrace};
use crate::numerics::params::prefixed;
use crate::numerics::rng::Rng;
use crate::numerics::tensor::{argmax, axpy, dot, norm, sigmoid};
use crate::numerics::{binary_ova_xent, weighted_softmax_xent, BiLstmParams, Linear, Parameters, Tensor};

/// Definition encoder plus one linear head per aspect over `[v; e]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnotationModel {
    pub variant: Variant,
    /// Dimension of the pretrained vectors (definition tokens, related
    /// words and the headword vector `e`).
    pub d_emb: usize,
    pub encoder: BiLstmParams,
    pub heads: BTreeMap<Aspect, Linear>,
}

impl Parameters for ConnotationModel {
    fn named_params(&self) -> Vec<(String, &Tensor)> {
        let mut v = prefixed("encoder", self.encoder.named_params());
        for (a, h) in &self.heads {
            v.extend(prefixed(&format!("head.{a}"), h.named_params()));
        }
        v
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut v = self.encoder.params_mut();
        for h in self.heads.values_mut() {
            v.extend(h.params_mut());
        }
        v
    }
}

/// Loss weights λ_a and per-class weights for the weighted cross-entropy.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LossSpec {
    pub lambda: BTreeMap<Aspect, f64>,
    pub class_weights: BTreeMap<Aspect, Vec<f64>>,
}

impl LossSpec {
    fn lambda(&self, a: Aspect) -> f64 {
        self.lambda.get(&a).copied().unwrap_or(1.0)
    }

    fn class_weights(&self, a: Aspect) -> Vec<f64> {
        self.class_weights
            .get(&a)
            .cloned()
            .unwrap_or_else(|| vec![1.0; a.num_outputs()])
    }
}

/// Inverse-frequency class weights `|train_a| / (C · count_c)` per
/// single-label aspect; classes absent from training get weight 1.
pub fn class_weights(train: &[Example]) -> BTreeMap<Aspect, Vec<f64>> {
    let mut counts: BTreeMap<Aspect, Vec<usize>> = BTreeMap::new();
    for ex in train {
        for (a, l) in &ex.labels {
            if let Some(c) = l.class_index() {
                counts.entry(*a).or_insert_with(|| vec![0; a.num_outputs()])[c] += 1;
            }
        }
    }
    counts
        .into_iter()
        .map(|(a, cs)| {
            let n: usize = cs.iter().sum();
            let k = cs.len() as f64;
            let w = cs
                .iter()
                .map(|&c| if c == 0 { 1.0 } else { n as f64 / (k * c as f64) })
                .collect();
            (a, w)
        })
        .collect()
}

struct Encoded {
    trace: BiLstmTrace,
    mask: Option<Vec<f64>>,
    /// `h` after dropout.
    h: Vec<f64>,
    attention: Option<(AttentionTrace, Tensor)>,
    norm: f64,
    v: Vec<f64>,
}

/// `[v; e]` input of a head.
fn head_input(v: &[f64], e: &[f64]) -> Vec<f64> {
    let mut x = v.to_vec();
    x.extend_from_slice(e);
    x
}

impl ConnotationModel {
    pub fn new(variant: Variant, d_emb: usize, hidden: usize, aspects: &[Aspect], rng: &mut Rng) -> Result<Self> {
        if variant == Variant::CeR && 2 * hidden != d_emb {
            return Err(Error::Config(format!(
                "related-word attention needs 2 * hidden ({}) to equal the embedding dimension ({d_emb})",
                2 * hidden
            )));
        }
        let encoder = BiLstmParams::init(d_emb, hidden, rng);
        let heads = aspects
            .iter()
            .map(|a| (*a, Linear::init(2 * hidden + d_emb, a.num_outputs(), rng)))
            .collect();
        Ok(ConnotationModel { variant, d_emb, encoder, heads })
    }

    /// Dimension of the connotation embedding.
    pub fn dim(&self) -> usize {
        self.encoder.output_dim()
    }

    fn encode(&self, input: &EncoderInput, mask: Option<Vec<f64>>) -> Result<Encoded> {
        let trace = bilstm_forward(&self.encoder, &input.tokens, None)?;
        let h_raw = trace.output();
        let h = match &mask {
            Some(m) => apply_mask(&h_raw, m),
            None => h_raw,
        };
        let mut u = h.clone();
        let attention = if self.variant == Variant::CeR && !input.related.is_empty() {
            let r = input.related_tensor()?;
            let at = attention_forward(&h, &r, &r)?;
            axpy(1.0, &at.output, &mut u);
            Some((at, r))
        } else {
            if self.variant == Variant::CeR {
                log::trace!("({}, {}) has no related words; encoding without attention", input.word, input.pos);
            }
            None
        };
        let n = norm(&u);
        if !(n > 0.0) {
            return Err(Error::ZeroNorm(input.word.clone()));
        }
        let v = u.iter().map(|x| x / n).collect();
        Ok(Encoded { trace, mask, h, attention, norm: n, v })
    }

    /// Unit-norm connotation embedding (no dropout).
    pub fn encode_word(&self, input: &EncoderInput) -> Result<Vec<f64>> {
        Ok(self.encode(input, None)?.v)
    }

    /// Predictions for every head that applies to the word's part of speech.
    pub fn predict(&self, input: &EncoderInput, threshold: f64) -> Result<BTreeMap<Aspect, Label>> {
        let v = self.encode_word(input)?;
        let e = input.pretrained_or_zero(self.d_emb);
        let heads: BTreeMap<Aspect, &Linear> = self
            .heads
            .iter()
            .filter(|(a, _)| a.applies_to(input.pos))
            .map(|(a, h)| (*a, h))
            .collect();
        Ok(predict_labels(&v, &e, &heads, threshold))
    }

    /// Weighted loss of one example over the aspects it is labeled with and
    /// this model has heads for. With `grad`, gradients scaled by `scale`
    /// are accumulated into it. Returns `None` when no aspect contributes.
    pub fn example_loss(
        &self,
        ex: &Example,
        spec: &LossSpec,
        mask: Option<Vec<f64>>,
        grad: Option<(&mut ConnotationModel, f64)>,
    ) -> Result<Option<f64>> {
        let aspects: Vec<(Aspect, &Label, &Linear)> = ex
            .labels
            .iter()
            .filter_map(|(a, l)| self.heads.get(a).map(|h| (*a, l, h)))
            .collect();
        if aspects.is_empty() {
            return Ok(None);
        }
        let enc = self.encode(&ex.input, mask)?;
        let e = ex.input.pretrained_or_zero(self.d_emb);
        let x = head_input(&enc.v, &e);
        let mut total = 0.0;
        let mut dv = vec![0.0; enc.v.len()];
        let mut grad = grad;
        for (a, label, head) in aspects {
            let logits = head.forward(&x);
            let lambda = spec.lambda(a);
            let (loss, dlogits) = match label {
                Label::Emotions(set) => binary_ova_xent(&logits, &set.flags()),
                other => {
                    let target = other.class_index().expect("single-label aspect");
                    weighted_softmax_xent(&logits, target, &spec.class_weights(a))?
                }
            };
            total += lambda * loss;
            if let Some((g, scale)) = grad.as_mut() {
                let dl: Vec<f64> = dlogits.iter().map(|d| d * lambda * *scale).collect();
                let gh = g.heads.get_mut(&a).expect("gradient mirrors model");
                let dx = head.backward(&x, &dl, gh);
                axpy(1.0, &dx[..dv.len()], &mut dv);
            }
        }
        if let Some((g, _)) = grad {
            self.backward_encoding(&enc, &dv, g);
        }
        Ok(Some(total))
    }

    fn backward_encoding(&self, enc: &Encoded, dv: &[f64], g: &mut ConnotationModel) {
        let proj = dot(&enc.v, dv);
        let du: Vec<f64> = dv.iter().zip(&enc.v).map(|(d, v)| (d - v * proj) / enc.norm).collect();
        let mut dh = du.clone();
        if let Some((at, r)) = &enc.attention {
            let ga = attention_backward(&enc.h, r, r, at, &du);
            axpy(1.0, &ga.dquery, &mut dh);
        }
        if let Some(m) = &enc.mask {
            dh = apply_mask(&dh, m);
        }
        let gb = bilstm_backward(&self.encoder, &enc.trace, &dh, None);
        g.encoder.add_assign(&gb.params);
    }
}

/// Argmax class per single-label head; emotion `i` is flagged when
/// `σ(logit_i) ≥ threshold`.
pub fn predict_labels(v: &[f64], e: &[f64], heads: &BTreeMap<Aspect, &Linear>, threshold: f64) -> BTreeMap<Aspect, Label> {
    let x = head_input(v, e);
    heads
        .iter()
        .map(|(a, h)| {
            let logits = h.forward(&x);
            let label = if a.is_emotion() {
                let flags: Vec<bool> = logits.iter().map(|z| sigmoid(*z) >= threshold).collect();
                Label::Emotions(EmotionSet::from_flags(&flags))
            } else {
                Label::from_class_index(*a, argmax(&logits)).expect("head width matches aspect")
            };
            (*a, label)
        })
        .collect()
}

/// Mean over the batch of each example's `Σ_a λ_a · L^a` (no dropout).
pub fn joint_loss(model: &ConnotationModel, batch: &[Example], spec: &LossSpec) -> Result<f64> {
    let mut total = 0.0;
    let mut counted = 0usize;
    for ex in batch {
        if let Some(l) = model.example_loss(ex, spec, None, None)? {
            total += l;
            counted += 1;
        }
    }
    if counted == 0 {
        return Err(Error::InvalidInput("batch has no labels for any trained aspect".into()));
    }
    Ok(total / batch.len() as f64)
}

/// Gradient of [`joint_loss`] with respect to every model parameter.
pub fn joint_loss_grad(model: &ConnotationModel, batch: &[Example], spec: &LossSpec) -> Result<(f64, ConnotationModel)> {
    let mut g = model.zeros_like();
    let scale = 1.0 / batch.len() as f64;
    let mut total = 0.0;
    for ex in batch {
        if let Some(l) = model.example_loss(ex, spec, None, Some((&mut g, scale)))? {
            total += l;
        }
    }
    Ok((total * scale, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aspect::{Polarity, Pos};
    use crate::numerics::gradcheck::grad_check;
    use crate::numerics::rng::rng_from;
    use approx::assert_abs_diff_eq;
    use rand::Rng as _;

    pub(crate) fn random_input(rng: &mut Rng, pos: Pos, d: usize, related: usize) -> EncoderInput {
        let mut r = |n: usize| -> Vec<Vec<f64>> { (0..n).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect() };
        let tokens = r(3);
        let related = r(related);
        let pretrained = r(1).pop();
        EncoderInput { word: "w".into(), pos, tokens, related, pretrained }
    }

    #[test]
    fn predict_examples() {
        let mut h = Linear::zeros(2, 3);
        h.b.data_mut().copy_from_slice(&[0.0, 5.0, 0.0]);
        let mut emo = Linear::zeros(2, 8);
        let heads = BTreeMap::from([(Aspect::Sentiment, &h), (Aspect::Emotion, &emo)]);
        let p = predict_labels(&[1.0], &[0.0], &heads, 0.5);
        assert_eq!(p[&Aspect::Sentiment], Label::Polar(Polarity::Neutral));
        assert_eq!(p[&Aspect::Emotion], Label::Emotions(EmotionSet::from_flags(&[true; 8])));
        emo.b.data_mut()[0] = -0.1;
        let heads = BTreeMap::from([(Aspect::Emotion, &emo)]);
        assert_eq!(predict_labels(&[1.0], &[0.0], &heads, 0.5)[&Aspect::Emotion].emotions().unwrap().len(), 7);
    }

    #[test]
    fn head_fixture_matches_matrix_oracle() {
        let mut h = Linear::zeros(3, 3);
        h.w.data_mut().copy_from_slice(&[1.0, 0.0, 2.0, 0.0, 1.0, -1.0, -1.0, 1.0, 0.0]);
        let heads = BTreeMap::from([(Aspect::Impact, &h)]);
        // x = [0.6, 0.8, 0.5]: logits (1.6, 0.3, 0.2) -> class 0 = negative
        let p = predict_labels(&[0.6, 0.8], &[0.5], &heads, 0.5);
        assert_eq!(p[&Aspect::Impact], Label::Polar(Polarity::Negative));
    }

    #[test]
    fn unit_norm_and_fallback() {
        let mut rng = rng_from(1);
        let m = ConnotationModel::new(Variant::CeR, 4, 2, &[Aspect::Sentiment], &mut rng).unwrap();
        let inp = random_input(&mut rng, Pos::Noun, 4, 3);
        let v = m.encode_word(&inp).unwrap();
        assert_abs_diff_eq!(norm(&v), 1.0, epsilon = 1e-12);
        let no_rel = EncoderInput { related: vec![], ..inp };
        let ce = ConnotationModel { variant: Variant::Ce, ..m.clone() };
        assert_eq!(m.encode_word(&no_rel).unwrap(), ce.encode_word(&no_rel).unwrap());
        assert!(ConnotationModel::new(Variant::CeR, 5, 2, &[], &mut rng).is_err());
    }

    fn example(rng: &mut Rng, pos: Pos, d: usize) -> Example {
        let input = random_input(rng, pos, d, 2);
        let labels = if pos == Pos::Verb {
            BTreeMap::from([
                (Aspect::PerspWriterTheme, Label::Polar(Polarity::Negative)),
                (Aspect::Power, Label::FourWay(2)),
            ])
        } else {
            BTreeMap::from([
                (Aspect::Sentiment, Label::Polar(Polarity::Positive)),
                (Aspect::Emotion, Label::Emotions(EmotionSet::from_names(["joy", "trust"]).unwrap())),
            ])
        };
        Example { input, labels }
    }

    #[test]
    fn single_aspect_loss_equals_xent() {
        let mut rng = rng_from(4);
        let m = ConnotationModel::new(Variant::Ce, 4, 2, &[Aspect::Sentiment], &mut rng).unwrap();
        let mut ex = example(&mut rng, Pos::Noun, 4);
        ex.labels.remove(&Aspect::Emotion);
        let spec = LossSpec::default();
        let v = m.encode_word(&ex.input).unwrap();
        let x = head_input(&v, ex.input.pretrained.as_ref().unwrap());
        let logits = m.heads[&Aspect::Sentiment].forward(&x);
        let (want, _) = weighted_softmax_xent(&logits, 2, &[1.0; 3]).unwrap();
        assert_abs_diff_eq!(joint_loss(&m, &[ex.clone()], &spec).unwrap(), want, epsilon = 1e-14);
        let double = LossSpec { lambda: BTreeMap::from([(Aspect::Sentiment, 2.0)]), ..spec.clone() };
        assert_abs_diff_eq!(joint_loss(&m, &[ex.clone()], &double).unwrap(), 2.0 * want, epsilon = 1e-14);
        ex.labels.clear();
        assert!(joint_loss(&m, &[ex], &spec).is_err());
    }

    #[test]
    fn joint_loss_gradient_tiny_config() {
        let aspects: Vec<Aspect> = vec![Aspect::Sentiment, Aspect::Emotion, Aspect::PerspWriterTheme, Aspect::Power];
        for trial in 0..5u64 {
            let mut rng = rng_from(50 + trial);
            let m = ConnotationModel::new(Variant::CeR, 4, 2, &aspects, &mut rng).unwrap();
            let batch = vec![example(&mut rng, Pos::Noun, 4), example(&mut rng, Pos::Verb, 4)];
            let spec = LossSpec {
                lambda: aspects.iter().map(|a| (*a, a.default_loss_weight())).collect(),
                class_weights: BTreeMap::from([(Aspect::Sentiment, vec![0.5, 1.0, 2.0])]),
            };
            let (_, g) = joint_loss_grad(&m, &batch, &spec).unwrap();
            let err = grad_check(
                |flat| {
                    let mut q = m.clone();
                    q.set_flat(flat);
                    joint_loss(&q, &batch, &spec).unwrap()
                },
                &m.flatten(),
                &g.flatten(),
                1e-4,
            );
            assert!(err < 1e-6, "trial {trial}: {err}");
        }
    }
}
