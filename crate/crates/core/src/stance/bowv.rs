//! Bag-of-words baseline: text and topic count vectors, concatenated, into
//! a multinomial logistic regression.

use std::collections::BTreeMap;

use super::data::{StanceExample, StanceLabel};
use crate::error::{Error, Result};
use crate::numerics::logistic::{LogisticConfig, LogisticRegression, SparseRow};

#[derive(Debug, Clone)]
pub struct BowModel {
    text_vocab: BTreeMap<String, usize>,
    topic_vocab: BTreeMap<String, usize>,
    lr: LogisticRegression,
}

fn vocab<'a>(words: impl Iterator<Item = &'a str>) -> BTreeMap<String, usize> {
    let set: std::collections::BTreeSet<&str> = words.collect();
    set.into_iter().enumerate().map(|(i, w)| (w.to_string(), i)).collect()
}

impl BowModel {
    /// Vocabularies come from the training examples only.
    pub fn fit(train: &[StanceExample], cfg: LogisticConfig) -> Result<BowModel> {
        let text_vocab = vocab(train.iter().flat_map(|e| e.tokens.iter().map(|t| t.word.as_str())));
        let topic_vocab = vocab(train.iter().flat_map(|e| e.topic_tokens.iter().map(String::as_str)));
        if text_vocab.is_empty() && topic_vocab.is_empty() {
            return Err(Error::InvalidInput("empty bag-of-words vocabulary".into()));
        }
        let mut m = BowModel {
            text_vocab,
            topic_vocab,
            lr: LogisticRegression { classes: 3, features: 0, w: Vec::new() },
        };
        let rows: Vec<SparseRow> = train.iter().map(|e| m.features(e)).collect();
        let labels: Vec<usize> = train.iter().map(|e| e.label.index()).collect();
        m.lr = LogisticRegression::fit(&rows, &labels, &vec![1.0; rows.len()], 3, m.num_features(), cfg)?;
        Ok(m)
    }

    pub fn num_features(&self) -> usize {
        self.text_vocab.len() + self.topic_vocab.len()
    }

    /// Text counts followed by topic counts; unknown words are dropped.
    pub fn features(&self, ex: &StanceExample) -> SparseRow {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for t in &ex.tokens {
            if let Some(&i) = self.text_vocab.get(&t.word) {
                *counts.entry(i).or_default() += 1.0;
            }
        }
        let off = self.text_vocab.len();
        for w in &ex.topic_tokens {
            if let Some(&i) = self.topic_vocab.get(w) {
                *counts.entry(off + i).or_default() += 1.0;
            }
        }
        counts.into_iter().collect()
    }

    pub fn predict(&self, ex: &StanceExample) -> StanceLabel {
        StanceLabel::from_index(self.lr.predict(&self.features(ex))).expect("three classes")
    }
}

pub fn bowv_predict(train: &[StanceExample], test: &[StanceExample]) -> Result<Vec<StanceLabel>> {
    let m = BowModel::fit(train, LogisticConfig::default())?;
    Ok(test.iter().map(|e| m.predict(e)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::metrics::macro_f1;
    use crate::stance::data::Token;

    fn ex(topic: &str, words: &str, label: StanceLabel) -> StanceExample {
        StanceExample {
            topic: topic.into(),
            topic_tokens: topic.split(' ').map(String::from).collect(),
            tokens: words.split(' ').map(|w| Token { word: w.into(), tag: "NN".into() }).collect(),
            label,
            author: "a".into(),
        }
    }

    fn fixture() -> (Vec<StanceExample>, Vec<StanceExample>) {
        use StanceLabel::*;
        let train = vec![
            ex("gun control", "ban weapons now", Pro),
            ex("gun control", "ban assault weapons", Pro),
            ex("gun control", "rights freedom weapons", Con),
            ex("gun control", "freedom rights", Con),
            ex("death penalty", "justice execute", Pro),
            ex("death penalty", "execute murderers justice", Pro),
            ex("death penalty", "mercy innocent", Con),
            ex("death penalty", "innocent lives mercy", Con),
            ex("gun control", "justice execute murderers", Neutral),
            ex("death penalty", "ban weapons", Neutral),
            ex("gun control", "mercy innocent lives", Neutral),
            ex("death penalty", "freedom rights weapons", Neutral),
        ];
        let test = vec![
            ex("gun control", "ban weapons", Pro),
            ex("gun control", "freedom", Con),
            ex("death penalty", "execute justice", Pro),
            ex("death penalty", "innocent", Con),
            ex("gun control", "execute", Neutral),
            ex("death penalty", "weapons ban", Neutral),
            ex("gun control", "unseen words only", Pro),
        ];
        (train, test)
    }

    #[test]
    fn frozen_fixture_matches_reference() {
        let (train, test) = fixture();
        let preds = bowv_predict(&train, &test).unwrap();
        let gold: Vec<StanceLabel> = test.iter().map(|e| e.label).collect();
        // predictions and score from a reference multinomial logistic
        // regression (C = 1, lbfgs) on the same count features
        let expected = REFERENCE_PREDS.map(|i| StanceLabel::from_index(i).unwrap());
        assert_eq!(preds, expected);
        let f1 = macro_f1(&preds, &gold, &StanceLabel::ALL);
        assert!((f1 - REFERENCE_F1).abs() < 1e-12, "{f1}");
    }

    const REFERENCE_PREDS: [usize; 7] = [1, 0, 1, 0, 1, 1, 0];
    const REFERENCE_F1: f64 = 0.45714285714285713;

    #[test]
    fn unknown_text_uses_topic_only() {
        let (train, _) = fixture();
        let m = BowModel::fit(&train, LogisticConfig::default()).unwrap();
        let f = m.features(&ex("gun control", "zzz qqq", StanceLabel::Pro));
        assert!(f.iter().all(|(i, _)| *i >= m.text_vocab.len()));
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn separable_fixture_fits_training_data() {
        // pro/con rows only; the neutral rows form an XOR of topic and words
        let (train, _) = fixture();
        let train = &train[..8];
        let m = BowModel::fit(train, LogisticConfig { c: 100.0, max_iter: 1000 }).unwrap();
        assert!(train.iter().all(|e| m.predict(e) == e.label));
    }
}
