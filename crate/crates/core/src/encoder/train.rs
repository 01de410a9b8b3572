//! Training loops for joint (J) and separate (S) modes with early stopping
//! on development macro-F1.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Mode, ModelConfig, Variant};
use super::data::{EncoderInput, Example};
use super::evaluate::{score, AspectScores};
use super::model::{class_weights, ConnotationModel, LossSpec};
use crate::aspect::{Aspect, Label};
use crate::embeddings::Embeddings;
use crate::error::{Error, Result};
use crate::eval::space::format_key;
use crate::numerics::dropout::dropout_mask;
use crate::numerics::rng::{derive_seed, rng_from, substream, tag};
use crate::numerics::{chunked_sum, AdamConfig, AdamState, Checkpoint, Linear, Parameters, Tensor};

/// Examples per parallel work unit when accumulating batch gradients.
const CHUNK: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Joint(ConnotationModel),
    Separate(BTreeMap<Aspect, ConnotationModel>),
}

impl Parameters for TrainedModel {
    fn named_params(&self) -> Vec<(String, &Tensor)> {
        match self {
            TrainedModel::Joint(m) => m.named_params(),
            TrainedModel::Separate(ms) => ms
                .iter()
                .flat_map(|(a, m)| crate::numerics::params::prefixed(a.as_str(), m.named_params()))
                .collect(),
        }
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        match self {
            TrainedModel::Joint(m) => m.params_mut(),
            TrainedModel::Separate(ms) => ms.values_mut().flat_map(|m| m.params_mut()).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    model: ModelConfig,
    d_emb: usize,
    aspects: Vec<Aspect>,
}

impl TrainedModel {
    pub fn mode(&self) -> Mode {
        match self {
            TrainedModel::Joint(_) => Mode::Joint,
            TrainedModel::Separate(_) => Mode::Separate,
        }
    }

    pub fn aspects(&self) -> Vec<Aspect> {
        match self {
            TrainedModel::Joint(m) => m.heads.keys().copied().collect(),
            TrainedModel::Separate(ms) => ms.keys().copied().collect(),
        }
    }

    pub fn joint(&self) -> Option<&ConnotationModel> {
        match self {
            TrainedModel::Joint(m) => Some(m),
            TrainedModel::Separate(_) => None,
        }
    }

    /// Fresh model with initialized weights for the given aspects.
    pub fn init(cfg: &ModelConfig, d_emb: usize, aspects: &[Aspect]) -> Result<TrainedModel> {
        let mut rng = substream(cfg.seed, "init");
        Ok(match cfg.mode {
            Mode::Joint => TrainedModel::Joint(ConnotationModel::new(cfg.variant, d_emb, cfg.hidden, aspects, &mut rng)?),
            Mode::Separate => TrainedModel::Separate(
                aspects
                    .iter()
                    .map(|a| {
                        let mut r = substream(cfg.seed, &format!("init-{a}"));
                        Ok((*a, ConnotationModel::new(cfg.variant, d_emb, cfg.hidden, &[*a], &mut r)?))
                    })
                    .collect::<Result<_>>()?,
            ),
        })
    }

    pub fn predict(&self, input: &EncoderInput, threshold: f64) -> Result<BTreeMap<Aspect, Label>> {
        match self {
            TrainedModel::Joint(m) => m.predict(input, threshold),
            TrainedModel::Separate(ms) => {
                let mut out = BTreeMap::new();
                for (a, m) in ms.iter().filter(|(a, _)| a.applies_to(input.pos)) {
                    out.extend(m.predict(input, threshold)?.into_iter().filter(|(b, _)| b == a));
                }
                Ok(out)
            }
        }
    }

    /// Predictions for every example, computed in parallel.
    pub fn predict_all(&self, examples: &[Example], threshold: f64) -> Result<Vec<BTreeMap<Aspect, Label>>> {
        examples.par_iter().map(|ex| self.predict(&ex.input, threshold)).collect()
    }

    pub fn to_checkpoint(&self, cfg: &ModelConfig) -> Checkpoint {
        let d_emb = match self {
            TrainedModel::Joint(m) => m.d_emb,
            TrainedModel::Separate(ms) => ms.values().next().map_or(0, |m| m.d_emb),
        };
        let header = CheckpointHeader {
            model: ModelConfig { mode: self.mode(), ..cfg.clone() },
            d_emb,
            aspects: self.aspects(),
        };
        Checkpoint::from_params(serde_json::to_value(header).expect("serializable header"), self)
    }

    pub fn from_checkpoint(ck: &Checkpoint) -> Result<(TrainedModel, ModelConfig)> {
        let h: CheckpointHeader = serde_json::from_value(ck.config.clone())
            .map_err(|e| Error::Config(format!("checkpoint header: {e}")))?;
        let mut m = TrainedModel::init(&h.model, h.d_emb, &h.aspects)?;
        ck.load_into(&mut m)?;
        Ok((m, h.model))
    }
}

/// Connotation embeddings keyed `word|pos`, one per input. Separate-mode
/// models have no single embedding space and are rejected.
pub fn export_embeddings(model: &TrainedModel, inputs: &[EncoderInput]) -> Result<Embeddings> {
    let m = model
        .joint()
        .ok_or_else(|| Error::Config("embedding export needs a joint-mode model".into()))?;
    let vectors: Vec<Vec<f64>> = inputs.par_iter().map(|i| m.encode_word(i)).collect::<Result<_>>()?;
    let mut out = Embeddings::new(m.dim());
    for (i, v) in inputs.iter().zip(vectors) {
        let key = format_key(&i.word, i.pos);
        if out.contains(&key) {
            return Err(Error::InvalidInput(format!("duplicate export key `{key}`")));
        }
        out.insert(&key, &v)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochLog {
    /// Set in separate mode.
    pub aspect: Option<Aspect>,
    pub epoch: usize,
    pub train_loss: f64,
    pub dev_macro_f1: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: TrainedModel,
    pub log: Vec<EpochLog>,
    /// Best development epoch per trained encoder (0 = initial weights).
    pub best_epoch: BTreeMap<String, usize>,
}

pub fn loss_spec(cfg: &ModelConfig, train: &[Example], aspects: &[Aspect]) -> LossSpec {
    LossSpec {
        lambda: aspects.iter().map(|a| (*a, cfg.loss_weight(*a))).collect(),
        class_weights: class_weights(train),
    }
}

/// Aspects with at least one training label, in canonical order.
pub fn trained_aspects(train: &[Example]) -> Vec<Aspect> {
    Aspect::all()
        .filter(|a| train.iter().any(|ex| ex.labels.contains_key(a)))
        .collect()
}

pub fn train(cfg: &ModelConfig, d_emb: usize, train: &[Example], dev: &[Example]) -> Result<TrainOutcome> {
    cfg.validate()?;
    let aspects = trained_aspects(train);
    if aspects.is_empty() {
        return Err(Error::InvalidInput("no labeled training examples".into()));
    }
    let dev = if dev.is_empty() {
        log::warn!("empty development set; selecting on training data");
        train
    } else {
        dev
    };
    let spec = loss_spec(cfg, train, &aspects);
    let init = TrainedModel::init(cfg, d_emb, &aspects)?;
    match init {
        TrainedModel::Joint(m) => {
            let (model, log, best) = fit(cfg, m, train, dev, &spec, None)?;
            Ok(TrainOutcome {
                model: TrainedModel::Joint(model),
                log,
                best_epoch: BTreeMap::from([("joint".to_string(), best)]),
            })
        }
        TrainedModel::Separate(ms) => {
            let mut models = BTreeMap::new();
            let mut log = Vec::new();
            let mut best_epoch = BTreeMap::new();
            for (a, m) in ms {
                let tr: Vec<Example> = train.iter().filter(|e| e.labels.contains_key(&a)).cloned().collect();
                let dv: Vec<Example> = dev.iter().filter(|e| e.labels.contains_key(&a)).cloned().collect();
                let dv = if dv.is_empty() { tr.clone() } else { dv };
                let (model, l, best) = fit(cfg, m, &tr, &dv, &spec, Some(a))?;
                models.insert(a, model);
                log.extend(l);
                best_epoch.insert(a.to_string(), best);
            }
            Ok(TrainOutcome { model: TrainedModel::Separate(models), log, best_epoch })
        }
    }
}

fn dev_score(model: &ConnotationModel, dev: &[Example], threshold: f64) -> Result<AspectScores> {
    let preds: Vec<_> = dev
        .par_iter()
        .map(|ex| model.predict(&ex.input, threshold))
        .collect::<Result<_>>()?;
    Ok(score(dev, &preds))
}

/// Minibatches of example indices. In joint mode noun/adjective and verb
/// examples form separate batches that alternate.
fn batches(order: &[usize], train: &[Example], size: usize, by_group: bool) -> Vec<Vec<usize>> {
    if !by_group {
        return order.chunks(size).map(<[usize]>::to_vec).collect();
    }
    let (verbs, nouns): (Vec<usize>, Vec<usize>) =
        order.iter().partition(|&&i| train[i].input.pos == crate::aspect::Pos::Verb);
    let mut a = nouns.chunks(size).map(<[usize]>::to_vec);
    let mut b = verbs.chunks(size).map(<[usize]>::to_vec);
    let mut out = Vec::new();
    loop {
        match (a.next(), b.next()) {
            (None, None) => break,
            (x, y) => out.extend(x.into_iter().chain(y)),
        }
    }
    out
}

struct Optimizers {
    encoder: AdamState<crate::numerics::BiLstmParams>,
    heads: BTreeMap<Aspect, AdamState<Linear>>,
}

fn fit(
    cfg: &ModelConfig,
    mut model: ConnotationModel,
    train: &[Example],
    dev: &[Example],
    spec: &LossSpec,
    aspect: Option<Aspect>,
) -> Result<(ConnotationModel, Vec<EpochLog>, usize)> {
    let adam = AdamConfig { lr: cfg.lr, ..AdamConfig::default() };
    let mut opt = Optimizers {
        encoder: AdamState::new(&model.encoder, adam),
        heads: model.heads.iter().map(|(a, h)| (*a, AdamState::new(h, adam))).collect(),
    };
    let stream = aspect.map_or(tag("joint"), |a| tag(a.as_str()));
    let mut log = Vec::new();
    let mut best = (dev_score(&model, dev, cfg.emotion_threshold)?.average(), 0usize, model.clone());
    let mut since_best = 0;
    let mut losses = Vec::new();
    let mut order: Vec<usize> = (0..train.len()).collect();

    for epoch in 1..=cfg.epochs {
        let epoch_seed = derive_seed(derive_seed(cfg.seed, stream), epoch as u64);
        order.sort_unstable();
        order.shuffle(&mut rng_from(epoch_seed));
        let mut epoch_loss = 0.0;
        for batch in batches(&order, train, cfg.batch_size, aspect.is_none()) {
            let scale = 1.0 / batch.len() as f64;
            let zero = model.zeros_like();
            let (loss, grad) = chunked_sum(&batch, CHUNK, &zero, |_, &i, g| {
                let mut rng = rng_from(derive_seed(epoch_seed, i as u64 + 1));
                let mask = (cfg.dropout > 0.0).then(|| dropout_mask(model.dim(), cfg.dropout, &mut rng));
                match model.example_loss(&train[i], spec, mask, Some((g, scale))) {
                    Ok(l) => Ok(l.unwrap_or(0.0)),
                    // An all-zero dropout mask; the example contributes nothing.
                    Err(Error::ZeroNorm(_)) => Ok(0.0),
                    Err(e) => Err(e),
                }
            })?;
            epoch_loss += loss;
            let verbs = train[batch[0]].input.pos == crate::aspect::Pos::Verb;
            opt.encoder.step(&mut model.encoder, &grad.encoder)?;
            for (a, st) in opt.heads.iter_mut() {
                if aspect.is_some() || a.is_verb_aspect() == verbs {
                    st.step(model.heads.get_mut(a).expect("head"), &grad.heads[a])?;
                }
            }
        }
        let train_loss = epoch_loss / train.len().max(1) as f64;
        let dev_f1 = dev_score(&model, dev, cfg.emotion_threshold)?.average();
        log::info!(
            "{}epoch {epoch}: loss {train_loss:.5}, dev macro-F1 {dev_f1:.4}",
            aspect.map(|a| format!("[{a}] ")).unwrap_or_default()
        );
        log.push(EpochLog { aspect, epoch, train_loss, dev_macro_f1: dev_f1 });
        losses.push(train_loss);
        if !train_loss.is_finite() {
            return Err(Error::TrainingStalled(losses));
        }
        if cfg.lr > 0.0 && epoch == cfg.stall_epochs && cfg.stall_epochs >= 2 && !losses[1..].iter().any(|l| *l < losses[0]) {
            return Err(Error::TrainingStalled(losses));
        }
        if dev_f1 > best.0 {
            best = (dev_f1, epoch, model.clone());
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                log::info!("early stop after epoch {epoch}; best epoch {}", best.1);
                break;
            }
        }
    }
    if cfg.epochs == 0 {
        return Ok((model, log, 0));
    }
    Ok((best.2, log, best.1))
}

/// Per-epoch log as CSV (`aspect,epoch,train_loss,dev_macro_f1`).
pub fn log_csv(log: &[EpochLog]) -> String {
    let mut s = String::from("aspect,epoch,train_loss,dev_macro_f1\n");
    for r in log {
        s.push_str(&format!(
            "{},{},{:.6},{:.6}\n",
            r.aspect.map_or("all", |a| a.as_str()),
            r.epoch,
            r.train_loss,
            r.dev_macro_f1
        ));
    }
    s
}

pub fn variant_name(cfg: &ModelConfig) -> String {
    let v = match cfg.variant {
        Variant::Ce => "CE",
        Variant::CeR => "CE+R",
    };
    format!("{v}({})", cfg.mode)
}
