use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::data::Example;
use crate::aspect::{Aspect, EmotionSet, Label, Pos};
use crate::eval::metrics::macro_f1;

/// Macro-F1 of one aspect. For emotions: the mean over the eight emotions
/// of binary macro-F1 over {absent, present}.
pub fn aspect_macro_f1(aspect: Aspect, golds: &[Label], preds: &[Label]) -> f64 {
    if aspect.is_emotion() {
        let flags = |ls: &[Label], i: usize| -> Vec<bool> {
            ls.iter().map(|l| l.emotions().is_some_and(|e| e.contains(i))).collect()
        };
        (0..EmotionSet::LEN)
            .map(|i| macro_f1(&flags(preds, i), &flags(golds, i), &[false, true]))
            .sum::<f64>()
            / EmotionSet::LEN as f64
    } else {
        let idx = |ls: &[Label]| -> Vec<usize> { ls.iter().map(|l| l.class_index().unwrap_or(usize::MAX)).collect() };
        let classes: Vec<usize> = (0..aspect.num_outputs()).collect();
        macro_f1(&idx(preds), &idx(golds), &classes)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AspectScores {
    pub per_aspect: BTreeMap<Aspect, f64>,
    pub counts: BTreeMap<Aspect, usize>,
}

impl AspectScores {
    /// Unweighted mean over scored aspects; 0 when nothing was scored.
    pub fn average(&self) -> f64 {
        if self.per_aspect.is_empty() {
            0.0
        } else {
            self.per_aspect.values().sum::<f64>() / self.per_aspect.len() as f64
        }
    }

    pub fn average_for(&self, aspects: &[Aspect]) -> Option<f64> {
        let vals: Vec<f64> = aspects.iter().filter_map(|a| self.per_aspect.get(a).copied()).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

/// Scores predictions against gold labels for every aspect that has both.
pub fn score(examples: &[Example], preds: &[BTreeMap<Aspect, Label>]) -> AspectScores {
    let mut pairs: BTreeMap<Aspect, (Vec<Label>, Vec<Label>)> = BTreeMap::new();
    for (ex, p) in examples.iter().zip(preds) {
        for (a, gold) in &ex.labels {
            if let Some(pred) = p.get(a) {
                let e = pairs.entry(*a).or_default();
                e.0.push(*gold);
                e.1.push(*pred);
            }
        }
    }
    let mut scores = AspectScores::default();
    for (a, (g, p)) in pairs {
        scores.per_aspect.insert(a, aspect_macro_f1(a, &g, &p));
        scores.counts.insert(a, g.len());
    }
    scores
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionRow {
    pub word: String,
    pub pos: Pos,
    pub aspect: Aspect,
    pub gold: serde_json::Value,
    pub pred: serde_json::Value,
}

pub fn prediction_rows(examples: &[Example], preds: &[BTreeMap<Aspect, Label>]) -> Vec<PredictionRow> {
    let mut rows = Vec::new();
    for (ex, p) in examples.iter().zip(preds) {
        for (a, gold) in &ex.labels {
            if let Some(pred) = p.get(a) {
                rows.push(PredictionRow {
                    word: ex.input.word.clone(),
                    pos: ex.input.pos,
                    aspect: *a,
                    gold: gold.to_json(),
                    pred: pred.to_json(),
                });
            }
        }
    }
    rows
}

pub fn write_jsonl<T: Serialize, W: Write>(rows: &[T], mut w: W) -> std::io::Result<()> {
    for r in rows {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aspect::Polarity;
    use approx::assert_abs_diff_eq;

    #[test]
    fn majority_fixture() {
        // gold: 2 neg, 1 neu, 1 pos; all predicted negative -> F1s (2/3, 0, 0)
        let gold: Vec<Label> = [-1, -1, 0, 1].iter().map(|v| Label::Polar(Polarity::from_value(*v).unwrap())).collect();
        let pred = vec![Label::Polar(Polarity::Negative); 4];
        assert_abs_diff_eq!(aspect_macro_f1(Aspect::Impact, &gold, &pred), 2.0 / 9.0, epsilon = 1e-12);
    }

    #[test]
    fn emotion_f1_is_mean_of_binary() {
        let g = vec![
            Label::Emotions(EmotionSet::from_names(["joy"]).unwrap()),
            Label::Emotions(EmotionSet::empty()),
        ];
        // perfect on all eight: joy has both classes, the rest only "absent"
        // (F1 of the never-seen "present" class is 0).
        let f = aspect_macro_f1(Aspect::Emotion, &g, &g);
        assert_abs_diff_eq!(f, (1.0 + 7.0 * 0.5) / 8.0, epsilon = 1e-12);
    }
}
