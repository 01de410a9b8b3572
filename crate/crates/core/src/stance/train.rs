//! Minibatch Adam training of BiC models with early stopping on development
//! macro-F1.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{AttentionKind, StanceConfig};
use super::data::{StanceExample, StanceLabel};
use super::evaluate::stance_f1;
use super::model::{AttentionSpace, BicModel, Featurizer};
use crate::embeddings::Embeddings;
use crate::error::{Error, Result};
use crate::numerics::dropout::dropout_mask;
use crate::numerics::rng::{derive_seed, rng_from, substream, tag};
use crate::numerics::{chunked_sum, AdamConfig, AdamState, Checkpoint, Parameters};

const CHUNK: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StanceEpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub dev_macro_f1: f64,
}

#[derive(Debug, Clone)]
pub struct StanceOutcome {
    pub model: BicModel,
    pub log: Vec<StanceEpochLog>,
    /// 0 means the initial weights scored best.
    pub best_epoch: usize,
}

#[derive(Serialize, Deserialize)]
struct Header {
    stance: StanceConfig,
    d_word: usize,
    d_att: Option<usize>,
}

pub fn init_model(cfg: &StanceConfig, d_word: usize, attention: Option<&AttentionSpace>) -> Result<BicModel> {
    cfg.validate()?;
    if d_word != cfg.word_dim {
        return Err(Error::Config(format!(
            "word vectors have dimension {d_word}, config expects word_dim = {}",
            cfg.word_dim
        )));
    }
    let d_att = match (cfg.attention, attention) {
        (AttentionKind::None, _) => None,
        (_, Some(space)) => Some(space.dim()),
        (kind, None) => {
            return Err(Error::Config(format!("attention `{kind}` needs an attention embedding table")));
        }
    };
    Ok(BicModel::new(d_word, cfg.hidden, d_att, &mut substream(cfg.seed, "stance-init")))
}

pub fn to_checkpoint(model: &BicModel, cfg: &StanceConfig) -> Checkpoint {
    let header = Header {
        stance: cfg.clone(),
        d_word: model.text_enc.d_in(),
        d_att: model.query.as_ref().map(|q| q.d_out()),
    };
    Checkpoint::from_params(serde_json::to_value(header).expect("serializable header"), model)
}

pub fn from_checkpoint(ck: &Checkpoint) -> Result<(BicModel, StanceConfig)> {
    let h: Header = serde_json::from_value(ck.config.clone())
        .map_err(|e| Error::Config(format!("stance checkpoint header: {e}")))?;
    let mut m = BicModel::new(h.d_word, h.stance.hidden, h.d_att, &mut rng_from(0));
    ck.load_into(&mut m)?;
    Ok((m, h.stance))
}

pub fn predict_all(model: &BicModel, feats: &Featurizer<'_>, examples: &[StanceExample]) -> Result<Vec<StanceLabel>> {
    examples.par_iter().map(|e| model.predict(&feats.input(e))).collect()
}

fn dev_f1(model: &BicModel, feats: &Featurizer<'_>, dev: &[StanceExample]) -> Result<f64> {
    let preds = predict_all(model, feats, dev)?;
    let gold: Vec<StanceLabel> = dev.iter().map(|e| e.label).collect();
    Ok(stance_f1(&preds, &gold))
}

pub fn train_bic(
    cfg: &StanceConfig,
    words: &Embeddings,
    attention: Option<&AttentionSpace>,
    train: &[StanceExample],
    dev: &[StanceExample],
) -> Result<StanceOutcome> {
    if train.is_empty() {
        return Err(Error::InvalidInput("no stance training examples".into()));
    }
    let dev = if dev.is_empty() {
        log::warn!("empty development set; selecting on training data");
        train
    } else {
        dev
    };
    let mut model = init_model(cfg, words.dim(), attention)?;
    let feats = Featurizer {
        words,
        attention: if cfg.attention == AttentionKind::None { None } else { attention },
        max_text_tokens: cfg.max_text_tokens,
    };
    let mut opt = AdamState::new(&model, AdamConfig { lr: cfg.lr, ..AdamConfig::default() });
    let mut best = (dev_f1(&model, &feats, dev)?, 0usize, model.clone());
    let mut since_best = 0;
    let mut log = Vec::new();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let stream = derive_seed(cfg.seed, tag("stance-train"));

    for epoch in 1..=cfg.epochs {
        let epoch_seed = derive_seed(stream, epoch as u64);
        order.sort_unstable();
        order.shuffle(&mut rng_from(epoch_seed));
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let scale = 1.0 / batch.len() as f64;
            let zero = model.zeros_like();
            let (loss, grad) = chunked_sum(batch, CHUNK, &zero, |_, &i, g| {
                let mut rng = rng_from(derive_seed(epoch_seed, i as u64 + 1));
                let mask = (cfg.dropout > 0.0).then(|| dropout_mask(model.feature_dim(), cfg.dropout, &mut rng));
                model.example_loss(&feats.input(&train[i]), train[i].label, mask.as_deref(), Some((g, scale)))
            })?;
            total += loss;
            opt.step(&mut model, &grad)?;
        }
        let train_loss = total / train.len() as f64;
        if !train_loss.is_finite() {
            return Err(Error::TrainingStalled(log.iter().map(|l: &StanceEpochLog| l.train_loss).chain([train_loss]).collect()));
        }
        let f1 = dev_f1(&model, &feats, dev)?;
        log::info!("epoch {epoch}: loss {train_loss:.5}, dev macro-F1 {f1:.4}");
        log.push(StanceEpochLog { epoch, train_loss, dev_macro_f1: f1 });
        if f1 > best.0 {
            best = (f1, epoch, model.clone());
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
        return Ok(StanceOutcome { model, log, best_epoch: 0 });
    }
    Ok(StanceOutcome { model: best.2, log, best_epoch: best.1 })
}

pub fn log_csv(log: &[StanceEpochLog]) -> String {
    let mut s = String::from("epoch,train_loss,dev_macro_f1\n");
    for r in log {
        s.push_str(&format!("{},{:.6},{:.6}\n", r.epoch, r.train_loss, r.dev_macro_f1));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::planted_stance;

    #[test]
    fn checkpoint_round_trip() {
        let cfg = StanceConfig { hidden: 3, word_dim: 4, attention: AttentionKind::Random, random_dim: 5, ..Default::default() };
        let space = AttentionSpace::Random { dim: 5, seed: 1 };
        let m = init_model(&cfg, 4, Some(&space)).unwrap();
        let mut buf = Vec::new();
        to_checkpoint(&m, &cfg).write_to(&mut buf).unwrap();
        let ck = Checkpoint::read_from(buf.as_slice(), std::path::Path::new("m.ckpt")).unwrap();
        let (back, c2) = from_checkpoint(&ck).unwrap();
        assert_eq!(c2, cfg);
        // stored as f32
        for (a, b) in m.flatten().iter().zip(back.flatten()) {
            assert_eq!(*a as f32 as f64, b);
        }
        assert!(init_model(&cfg, 4, None).is_err());
        assert!(init_model(&cfg, 7, Some(&space)).is_err());
    }

    #[test]
    fn learns_small_planted_corpus() {
        use crate::stance::data::{add_neutrals, build_splits};
        let data = planted_stance(3, 150, 8, 12, 5);
        let mut splits = build_splits(&data.examples, 3).unwrap();
        add_neutrals(&mut splits, 0.5, 3).unwrap();
        let cfg = StanceConfig { hidden: 8, word_dim: 8, epochs: 15, patience: 15, lr: 0.01, dropout: 0.1, batch_size: 16, ..Default::default() };
        let out = train_bic(&cfg, &data.words, None, &splits.train, &splits.dev).unwrap();
        let again = train_bic(&cfg, &data.words, None, &splits.train, &splits.dev).unwrap();
        assert_eq!(out.model, again.model);
        assert!(out.log[0].train_loss > out.log.last().unwrap().train_loss);
        let best = out.log.iter().map(|l| l.dev_macro_f1).fold(0.0, f64::max);
        assert!(best > 0.8, "{:?}", out.log);
    }
}
