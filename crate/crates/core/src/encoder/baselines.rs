//! Majority-class and logistic-regression baselines on pretrained vectors.

use std::collections::BTreeMap;

use super::data::Example;
use crate::aspect::{Aspect, EmotionSet, Label};
use crate::numerics::logistic::{balanced_class_weights, dense_row, LogisticConfig, LogisticRegression, SparseRow};

pub type Predictions = Vec<BTreeMap<Aspect, Label>>;

fn aspects_in(train: &[Example]) -> Vec<Aspect> {
    Aspect::all().filter(|a| train.iter().any(|e| e.labels.contains_key(a))).collect()
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, c) in counts.iter().enumerate() {
        if *c > counts[best] {
            best = i;
        }
    }
    best
}

/// Most frequent training class per aspect (lowest index on ties); for
/// emotions the majority value of each flag.
pub fn majority_labels(train: &[Example]) -> BTreeMap<Aspect, Label> {
    let mut out = BTreeMap::new();
    for a in aspects_in(train) {
        let labels: Vec<&Label> = train.iter().filter_map(|e| e.labels.get(&a)).collect();
        let label = if a.is_emotion() {
            let flags: Vec<bool> = (0..EmotionSet::LEN)
                .map(|i| 2 * labels.iter().filter(|l| l.emotions().is_some_and(|s| s.contains(i))).count() > labels.len())
                .collect();
            Label::Emotions(EmotionSet::from_flags(&flags))
        } else {
            let mut counts = vec![0; a.num_outputs()];
            for l in &labels {
                counts[l.class_index().expect("single label")] += 1;
            }
            Label::from_class_index(a, majority(&counts)).expect("valid class")
        };
        out.insert(a, label);
    }
    out
}

pub fn majority_baseline(train: &[Example], test: &[Example]) -> Predictions {
    let maj = majority_labels(train);
    test.iter()
        .map(|ex| maj.iter().filter(|(a, _)| a.applies_to(ex.input.pos)).map(|(a, l)| (*a, *l)).collect())
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct LrReport {
    /// Aspects (or `emotion:<name>` flags) with a single training class.
    pub skipped: Vec<String>,
    /// Training examples without a pretrained headword vector.
    pub train_without_vector: usize,
}

fn fit_binary_or_multi(rows: &[SparseRow], labels: &[usize], classes: usize, dim: usize) -> Option<LogisticRegression> {
    let distinct = labels.iter().collect::<std::collections::BTreeSet<_>>().len();
    if distinct < 2 {
        return None;
    }
    let weights = balanced_class_weights(labels, classes);
    let sw: Vec<f64> = labels.iter().map(|&l| weights[l]).collect();
    LogisticRegression::fit(rows, labels, &sw, classes, dim, LogisticConfig::default()).ok()
}

/// Per-aspect (per-emotion) logistic regression on the headword's pretrained
/// vector with inverse-frequency sample weights. Aspects whose training data
/// has one class are skipped and get no predictions.
pub fn lr_baseline(train: &[Example], test: &[Example], dim: usize) -> (Predictions, LrReport) {
    let mut report = LrReport {
        train_without_vector: train.iter().filter(|e| e.input.pretrained.is_none()).count(),
        ..Default::default()
    };
    let usable: Vec<&Example> = train.iter().filter(|e| e.input.pretrained.is_some()).collect();
    let test_rows: Vec<SparseRow> = test.iter().map(|e| dense_row(&e.input.pretrained_or_zero(dim))).collect();
    let mut preds: Predictions = vec![BTreeMap::new(); test.len()];
    for a in aspects_in(train) {
        let ex: Vec<&Example> = usable.iter().copied().filter(|e| e.labels.contains_key(&a)).collect();
        let rows: Vec<SparseRow> = ex.iter().map(|e| dense_row(e.input.pretrained.as_ref().expect("filtered"))).collect();
        if a.is_emotion() {
            let mut models = Vec::new();
            for (i, name) in EmotionSet::NAMES.iter().enumerate() {
                let y: Vec<usize> = ex
                    .iter()
                    .map(|e| usize::from(e.labels[&a].emotions().is_some_and(|s| s.contains(i))))
                    .collect();
                match fit_binary_or_multi(&rows, &y, 2, dim) {
                    Some(m) => models.push(Some(m)),
                    None => {
                        log::warn!("LR baseline: emotion {name} has a single training class");
                        report.skipped.push(format!("emotion:{name}"));
                        models.push(None);
                    }
                }
            }
            let default = majority_labels(train).get(&a).and_then(|l| l.emotions()).unwrap_or_default();
            for ((p, row), ex) in preds.iter_mut().zip(&test_rows).zip(test) {
                if !a.applies_to(ex.input.pos) {
                    continue;
                }
                let flags: Vec<bool> = models
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.as_ref().map_or(default.contains(i), |m| m.predict(row) == 1))
                    .collect();
                p.insert(a, Label::Emotions(EmotionSet::from_flags(&flags)));
            }
        } else {
            let y: Vec<usize> = ex.iter().map(|e| e.labels[&a].class_index().expect("single label")).collect();
            let Some(m) = fit_binary_or_multi(&rows, &y, a.num_outputs(), dim) else {
                log::warn!("LR baseline: aspect {a} has a single training class; skipped");
                report.skipped.push(a.to_string());
                continue;
            };
            for ((p, row), ex) in preds.iter_mut().zip(&test_rows).zip(test) {
                if a.applies_to(ex.input.pos) {
                    p.insert(a, Label::from_class_index(a, m.predict(row)).expect("class index"));
                }
            }
        }
    }
    (preds, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aspect::{Polarity, Pos};
    use crate::encoder::data::EncoderInput;
    use crate::encoder::evaluate::score;
    use approx::assert_abs_diff_eq;

    fn ex(v: [f64; 2], pol: i64) -> Example {
        Example {
            input: EncoderInput { word: "w".into(), pos: Pos::Noun, tokens: vec![], related: vec![], pretrained: Some(v.to_vec()) },
            labels: BTreeMap::from([(Aspect::Sentiment, Label::Polar(Polarity::from_value(pol).unwrap()))]),
        }
    }

    #[test]
    fn majority_on_half_majority_test() {
        let train = vec![ex([0.0, 0.0], 1), ex([0.0, 0.0], 1), ex([0.0, 0.0], 0)];
        // test: 2 positive, 1 neutral, 1 negative; predict positive everywhere
        let test = vec![ex([0.0, 0.0], 1), ex([0.0, 0.0], 1), ex([0.0, 0.0], 0), ex([0.0, 0.0], -1)];
        let s = score(&test, &majority_baseline(&train, &test));
        // positive F1 = 2*2/(2+4) = 2/3, others 0
        assert_abs_diff_eq!(s.per_aspect[&Aspect::Sentiment], 2.0 / 9.0, epsilon = 1e-12);
    }

    #[test]
    fn lr_separable_and_degenerate() {
        let train = vec![ex([2.0, 1.0], 1), ex([3.0, 0.0], 1), ex([-2.0, 1.0], -1), ex([-3.0, 0.5], -1)];
        let test = vec![ex([2.5, 0.3], 1), ex([-1.5, 0.2], -1)];
        let (p, rep) = lr_baseline(&train, &test, 2);
        assert!(rep.skipped.is_empty());
        assert_eq!(score(&test, &p).per_aspect[&Aspect::Sentiment], 2.0 / 3.0);
        let one_class = vec![ex([1.0, 0.0], 1), ex([2.0, 0.0], 1)];
        let (p, rep) = lr_baseline(&one_class, &test, 2);
        assert_eq!(rep.skipped, vec!["sentiment".to_string()]);
        assert!(p.iter().all(BTreeMap::is_empty));
    }
}
