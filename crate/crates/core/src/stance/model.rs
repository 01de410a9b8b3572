//! Bidirectional conditional encoding (BiC) with optional topic-query
//! attention over the text's noun, adjective and verb embeddings.

use rand::Rng as _;

use super::data::{StanceExample, StanceLabel};
use crate::aspect::Pos;
use crate::embeddings::Embeddings;
use crate::error::{Error, Result};
use crate::eval::space::format_key;
use crate::numerics::attention::{attention_backward, attention_forward, AttentionTrace};
use crate::numerics::lstm::{bilstm_backward, bilstm_forward, BiLstmTrace};
use crate::numerics::params::prefixed;
use crate::numerics::rng::{derive_seed, rng_from, tag, Rng};
use crate::numerics::tensor::{argmax, norm};
use crate::numerics::{weighted_softmax_xent, BiLstmParams, Linear, Parameters, Tensor};

/// Vectors read by the attention layer. Unknown keys give the zero vector.
#[derive(Debug, Clone)]
pub enum AttentionSpace {
    /// Looked up by surface word.
    Words(Embeddings),
    /// Looked up by `word|pos`.
    Keyed(Embeddings),
    /// Fixed unit vectors derived from the word and a seed.
    Random { dim: usize, seed: u64 },
}

impl AttentionSpace {
    pub fn dim(&self) -> usize {
        match self {
            AttentionSpace::Words(e) | AttentionSpace::Keyed(e) => e.dim(),
            AttentionSpace::Random { dim, .. } => *dim,
        }
    }

    pub fn vector(&self, word: &str, pos: Pos) -> Vec<f64> {
        let found = match self {
            AttentionSpace::Words(e) => e.get(word),
            AttentionSpace::Keyed(e) => e.get(&format_key(word, pos)),
            AttentionSpace::Random { dim, seed } => Some(random_vector(word, *dim, *seed)),
        };
        found.unwrap_or_else(|| vec![0.0; self.dim()])
    }
}

pub fn random_vector(word: &str, dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from(derive_seed(seed, tag(word)));
    let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = norm(&v);
    if n == 0.0 {
        return v;
    }
    v.into_iter().map(|x| x / n).collect()
}

/// Dense inputs for one example.
#[derive(Debug, Clone, PartialEq)]
pub struct StanceInput {
    pub topic: Vec<Vec<f64>>,
    pub text: Vec<Vec<f64>>,
    /// Attention embeddings of the noun/adjective/verb tokens.
    pub keys: Vec<Vec<f64>>,
}

/// Turns examples into model inputs. Words without a pretrained vector
/// enter the encoders as zero vectors.
pub struct Featurizer<'a> {
    pub words: &'a Embeddings,
    pub attention: Option<&'a AttentionSpace>,
    pub max_text_tokens: Option<usize>,
}

impl Featurizer<'_> {
    fn word(&self, w: &str) -> Vec<f64> {
        self.words.get(w).unwrap_or_else(|| vec![0.0; self.words.dim()])
    }

    pub fn input(&self, ex: &StanceExample) -> StanceInput {
        let n = self.max_text_tokens.unwrap_or(usize::MAX).min(ex.tokens.len());
        let tokens = &ex.tokens[..n];
        let keys = match self.attention {
            Some(space) => tokens
                .iter()
                .filter_map(|t| t.pos().map(|p| space.vector(&t.word, p)))
                .collect(),
            None => Vec::new(),
        };
        StanceInput {
            topic: ex.topic_tokens.iter().map(|w| self.word(w)).collect(),
            text: tokens.iter().map(|t| self.word(&t.word)).collect(),
            keys,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BicModel {
    pub topic_enc: BiLstmParams,
    pub text_enc: BiLstmParams,
    /// Projects the topic encoding into the attention space (BiC+E only).
    pub query: Option<Linear>,
    pub out: Linear,
}

impl Parameters for BicModel {
    fn named_params(&self) -> Vec<(String, &Tensor)> {
        let mut v = prefixed("topic", self.topic_enc.named_params());
        v.extend(prefixed("text", self.text_enc.named_params()));
        if let Some(q) = &self.query {
            v.extend(prefixed("query", q.named_params()));
        }
        v.extend(prefixed("out", self.out.named_params()));
        v
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut v = self.topic_enc.params_mut();
        v.extend(self.text_enc.params_mut());
        if let Some(q) = &mut self.query {
            v.extend(q.params_mut());
        }
        v.extend(self.out.params_mut());
        v
    }
}

struct Attended {
    q: Vec<f64>,
    keys: Tensor,
    trace: AttentionTrace,
}

struct Forward {
    topic: BiLstmTrace,
    text: BiLstmTrace,
    h_p: Vec<f64>,
    att: Option<Attended>,
    /// Prediction-layer input after dropout.
    z: Vec<f64>,
    logits: Vec<f64>,
}

impl BicModel {
    /// `d_att` is the attention embedding size, `None` for plain BiC.
    pub fn new(d_word: usize, hidden: usize, d_att: Option<usize>, rng: &mut Rng) -> Self {
        let topic_enc = BiLstmParams::init(d_word, hidden, rng);
        let text_enc = BiLstmParams::init(d_word, hidden, rng);
        let query = d_att.map(|d| Linear::init(2 * hidden, d, rng));
        let out = Linear::init(2 * hidden + d_att.unwrap_or(0), 3, rng);
        BicModel { topic_enc, text_enc, query, out }
    }

    pub fn hidden(&self) -> usize {
        self.text_enc.hidden()
    }

    pub fn att_dim(&self) -> usize {
        self.query.as_ref().map_or(0, Linear::d_out)
    }

    /// Width of the prediction-layer input, the size of a dropout mask.
    pub fn feature_dim(&self) -> usize {
        2 * self.hidden() + self.att_dim()
    }

    fn forward(&self, x: &StanceInput, mask: Option<&[f64]>) -> Result<Forward> {
        let topic = bilstm_forward(&self.topic_enc, &x.topic, None)?;
        let text = bilstm_forward(&self.text_enc, &x.text, Some(&topic.final_cells()))?;
        let h_p = topic.output();
        let mut z = text.output();
        let mut att = None;
        if let Some(q_layer) = &self.query {
            if x.keys.is_empty() {
                log::debug!("no noun, adjective or verb tokens; attention term is zero");
                z.extend(std::iter::repeat(0.0).take(q_layer.d_out()));
            } else {
                let keys = Tensor::from_rows(&x.keys)?;
                let q = q_layer.forward(&h_p);
                let trace = attention_forward(&q, &keys, &keys)?;
                z.extend_from_slice(&trace.output);
                att = Some(Attended { q, keys, trace });
            }
        }
        if let Some(m) = mask {
            if m.len() != z.len() {
                return Err(Error::Shape(format!("dropout mask of {} for {} features", m.len(), z.len())));
            }
            z.iter_mut().zip(m).for_each(|(a, b)| *a *= b);
        }
        let logits = self.out.forward(&z);
        Ok(Forward { topic, text, h_p, att, z, logits })
    }

    pub fn logits(&self, x: &StanceInput) -> Result<Vec<f64>> {
        Ok(self.forward(x, None)?.logits)
    }

    pub fn predict(&self, x: &StanceInput) -> Result<StanceLabel> {
        Ok(StanceLabel::from_index(argmax(&self.logits(x)?)).expect("three logits"))
    }

    /// Cross-entropy of one example. With `grad`, adds `scale` times the
    /// gradient into the given accumulator.
    pub fn example_loss(
        &self,
        x: &StanceInput,
        label: StanceLabel,
        mask: Option<&[f64]>,
        grad: Option<(&mut BicModel, f64)>,
    ) -> Result<f64> {
        let fw = self.forward(x, mask)?;
        let (loss, dlogits) = weighted_softmax_xent(&fw.logits, label.index(), &[1.0; 3])?;
        let Some((g, scale)) = grad else {
            return Ok(loss);
        };
        let dlogits: Vec<f64> = dlogits.iter().map(|d| d * scale).collect();
        let mut dz = self.out.backward(&fw.z, &dlogits, &mut g.out);
        if let Some(m) = mask {
            dz.iter_mut().zip(m).for_each(|(a, b)| *a *= b);
        }
        let h2 = 2 * self.hidden();
        let mut dh_p = vec![0.0; h2];
        if let (Some(a), Some(q_layer), Some(gq)) = (&fw.att, &self.query, g.query.as_mut()) {
            let ag = attention_backward(&a.q, &a.keys, &a.keys, &a.trace, &dz[h2..]);
            dh_p = q_layer.backward(&fw.h_p, &ag.dquery, gq);
        }
        let tg = bilstm_backward(&self.text_enc, &fw.text, &dz[..h2], None);
        g.text_enc.add_assign(&tg.params);
        let pg = bilstm_backward(&self.topic_enc, &fw.topic, &dh_p, Some(&tg.dinit));
        g.topic_enc.add_assign(&pg.params);
        Ok(loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gradcheck::grad_check;
    use crate::numerics::rng::rng_from;

    fn random_input(rng: &mut Rng, d: usize, d_att: usize, topic: usize, text: usize, keys: usize) -> StanceInput {
        let mut v = |n: usize, dim: usize| -> Vec<Vec<f64>> {
            (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
        };
        StanceInput { topic: v(topic, d), text: v(text, d), keys: v(keys, d_att) }
    }

    /// Parameters set to 0.5 * sin(i + 1) over the flattened order, matching
    /// the independent script that produced the frozen logits.
    fn sine_model(d: usize, h: usize, d_att: Option<usize>) -> BicModel {
        let mut m = BicModel::new(d, h, d_att, &mut rng_from(0));
        let flat: Vec<f64> = (0..m.num_params()).map(|i| 0.5 * ((i + 1) as f64).sin()).collect();
        m.set_flat(&flat);
        m
    }

    fn fixture_input() -> StanceInput {
        StanceInput {
            topic: vec![vec![0.3, -0.2]],
            text: vec![vec![0.1, 0.4], vec![-0.5, 0.2]],
            keys: vec![vec![0.2, -0.1, 0.3], vec![-0.4, 0.5, 0.1]],
        }
    }

    #[test]
    fn tiny_fixture_logits() {
        let x = fixture_input();
        let bic = sine_model(2, 2, None).logits(&StanceInput { keys: vec![], ..x.clone() }).unwrap();
        let att = sine_model(2, 2, Some(3)).logits(&x).unwrap();
        let expect_bic = [0.07172458664957161, -0.6547234136495206, -0.3338979808218682];
        let expect_att = [0.25001773488989887, -0.17033599247968495, -0.48985312926315916];
        for k in 0..3 {
            assert!((bic[k] - expect_bic[k]).abs() < 1e-12, "{bic:?}");
            assert!((att[k] - expect_att[k]).abs() < 1e-12, "{att:?}");
        }
    }

    #[test]
    fn zero_attention_embeddings_equal_padded_bic() {
        let mut rng = rng_from(2);
        let m = BicModel::new(3, 4, Some(5), &mut rng);
        let mut x = random_input(&mut rng, 3, 5, 2, 4, 3);
        x.keys.iter_mut().for_each(|k| k.fill(0.0));
        let topic = bilstm_forward(&m.topic_enc, &x.topic, None).unwrap();
        let mut z = bilstm_forward(&m.text_enc, &x.text, Some(&topic.final_cells())).unwrap().output();
        z.extend([0.0; 5]);
        assert_eq!(m.logits(&x).unwrap(), m.out.forward(&z));
    }

    #[test]
    fn constant_keys_give_that_vector() {
        let mut rng = rng_from(3);
        let m = BicModel::new(3, 4, Some(2), &mut rng);
        for n in 1..5 {
            let mut x = random_input(&mut rng, 3, 2, 2, 3, n);
            x.keys.iter_mut().for_each(|k| *k = vec![0.7, -0.2]);
            let fw = m.forward(&x, None).unwrap();
            let out = &fw.att.unwrap().trace.output;
            assert!((out[0] - 0.7).abs() < 1e-12 && (out[1] + 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn no_keys_gives_zero_attention_term() {
        let mut rng = rng_from(4);
        let m = BicModel::new(3, 2, Some(2), &mut rng);
        let x = random_input(&mut rng, 3, 2, 1, 2, 0);
        let fw = m.forward(&x, None).unwrap();
        assert_eq!(&fw.z[4..], &[0.0, 0.0]);
    }

    #[test]
    fn gradient_check_bic_and_attention() {
        let mut rng = rng_from(21);
        for trial in 0..20 {
            let d_att = if trial % 2 == 0 { None } else { Some(3) };
            let m = BicModel::new(3, 2, d_att, &mut rng);
            let x = random_input(&mut rng, 3, 3, 1 + trial % 2, 2 + trial % 3, 1 + trial % 3);
            let label = StanceLabel::from_index(trial % 3).unwrap();
            let mask: Vec<f64> = (0..m.feature_dim()).map(|i| if (i + trial) % 4 == 0 { 0.0 } else { 2.0 }).collect();
            let mut g = m.zeros_like();
            m.example_loss(&x, label, Some(&mask), Some((&mut g, 1.0))).unwrap();
            let mut probe = m.clone();
            let err = grad_check(
                |w| {
                    probe.set_flat(w);
                    probe.example_loss(&x, label, Some(&mask), None).unwrap()
                },
                &m.flatten(),
                &g.flatten(),
                1e-4,
            );
            assert!(err < 1e-6, "trial {trial}: {err}");
        }
    }

    #[test]
    fn random_space_is_fixed_unit() {
        let s = AttentionSpace::Random { dim: 6, seed: 2 };
        let a = s.vector("gun", Pos::Noun);
        assert_eq!(a, s.vector("gun", Pos::Verb));
        assert!((norm(&a) - 1.0).abs() < 1e-12);
        assert_ne!(a, s.vector("guns", Pos::Noun));
        let k = AttentionSpace::Keyed(Embeddings::new(6));
        assert_eq!(k.vector("gun", Pos::Noun), vec![0.0; 6]);
    }
}
