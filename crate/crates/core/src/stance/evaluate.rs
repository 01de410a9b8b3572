//! Overall and per-topic stance macro-F1 and paired significance.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::data::{csv_field, StanceExample, StanceLabel};
use crate::error::{Error, Result};
use crate::eval::metrics::macro_f1;
use crate::eval::significance::paired_randomization;
use crate::numerics::rng::{derive_seed, tag};

pub fn stance_f1(preds: &[StanceLabel], gold: &[StanceLabel]) -> f64 {
    macro_f1(preds, gold, &StanceLabel::ALL)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StanceScores {
    pub overall: f64,
    /// Topics present in the test set only.
    pub per_topic: BTreeMap<String, f64>,
    pub counts: BTreeMap<String, usize>,
}

fn check_lengths(test: &[StanceExample], preds: &[StanceLabel]) -> Result<()> {
    if test.len() != preds.len() {
        return Err(Error::InvalidInput(format!(
            "{} predictions for {} test examples",
            preds.len(),
            test.len()
        )));
    }
    Ok(())
}

fn by_topic(test: &[StanceExample]) -> BTreeMap<&str, Vec<usize>> {
    let mut m: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, e) in test.iter().enumerate() {
        m.entry(e.topic.as_str()).or_default().push(i);
    }
    m
}

pub fn evaluate_stance(test: &[StanceExample], preds: &[StanceLabel]) -> Result<StanceScores> {
    check_lengths(test, preds)?;
    let gold: Vec<StanceLabel> = test.iter().map(|e| e.label).collect();
    let mut per_topic = BTreeMap::new();
    let mut counts = BTreeMap::new();
    for (topic, idx) in by_topic(test) {
        let p: Vec<StanceLabel> = idx.iter().map(|&i| preds[i]).collect();
        let g: Vec<StanceLabel> = idx.iter().map(|&i| gold[i]).collect();
        per_topic.insert(topic.to_string(), stance_f1(&p, &g));
        counts.insert(topic.to_string(), idx.len());
    }
    Ok(StanceScores {
        overall: stance_f1(preds, &gold),
        per_topic,
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicComparison {
    /// A topic name, or `Overall`.
    pub topic: String,
    pub n: usize,
    pub f1_a: f64,
    pub f1_b: f64,
    pub p: f64,
}

/// Macro-F1 of two systems on the same test set with randomization
/// p-values, overall first and then per topic. Each row uses its own seed
/// derived from `seed` and the row name.
pub fn compare_systems(
    test: &[StanceExample],
    preds_a: &[StanceLabel],
    preds_b: &[StanceLabel],
    rounds: usize,
    seed: u64,
) -> Result<Vec<TopicComparison>> {
    check_lengths(test, preds_a)?;
    check_lengths(test, preds_b)?;
    let mut groups: Vec<(String, Vec<usize>)> = vec![("Overall".into(), (0..test.len()).collect())];
    groups.extend(by_topic(test).into_iter().map(|(t, idx)| (t.to_string(), idx)));
    groups
        .into_iter()
        .map(|(topic, idx)| {
            let gold: Vec<StanceLabel> = idx.iter().map(|&i| test[i].label).collect();
            let a: Vec<StanceLabel> = idx.iter().map(|&i| preds_a[i]).collect();
            let b: Vec<StanceLabel> = idx.iter().map(|&i| preds_b[i]).collect();
            let (_, p) = paired_randomization(&a, &b, rounds, derive_seed(seed, tag(&topic)), |x, y| {
                stance_f1(x, &gold) - stance_f1(y, &gold)
            })?;
            Ok(TopicComparison {
                f1_a: stance_f1(&a, &gold),
                f1_b: stance_f1(&b, &gold),
                n: idx.len(),
                topic,
                p,
            })
        })
        .collect()
}

pub fn comparison_csv(rows: &[TopicComparison], name_a: &str, name_b: &str) -> String {
    let mut s = format!("topic,n,f1_{},f1_{},p\n", csv_field(name_a), csv_field(name_b));
    for r in rows {
        let _ = writeln!(s, "{},{},{:.6},{:.6},{:.6}", csv_field(&r.topic), r.n, r.f1_a, r.f1_b, r.p);
    }
    s
}

pub fn scores_csv(scores: &StanceScores) -> String {
    let mut s = String::from("topic,n,macro_f1\n");
    let total: usize = scores.counts.values().sum();
    let _ = writeln!(s, "Overall,{total},{:.6}", scores.overall);
    for (t, f) in &scores.per_topic {
        let _ = writeln!(s, "{},{},{f:.6}", csv_field(t), scores.counts[t]);
    }
    s
}

/// One line of a stance predictions file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StancePrediction {
    pub index: usize,
    pub topic: String,
    pub gold: StanceLabel,
    pub pred: StanceLabel,
}

pub fn prediction_rows(test: &[StanceExample], preds: &[StanceLabel]) -> Vec<StancePrediction> {
    test.iter()
        .zip(preds)
        .enumerate()
        .map(|(index, (e, p))| StancePrediction {
            index,
            topic: e.topic.clone(),
            gold: e.label,
            pred: *p,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stance::data::Token;
    use StanceLabel::*;

    fn ex(topic: &str, label: StanceLabel) -> StanceExample {
        StanceExample {
            topic: topic.into(),
            topic_tokens: vec![topic.into()],
            tokens: vec![Token { word: "w".into(), tag: "NN".into() }],
            label,
            author: "a".into(),
        }
    }

    #[test]
    fn perfect_predictions() {
        let test = vec![ex("a", Pro), ex("a", Con), ex("b", Neutral), ex("b", Pro), ex("b", Con), ex("a", Neutral)];
        let gold: Vec<_> = test.iter().map(|e| e.label).collect();
        let s = evaluate_stance(&test, &gold).unwrap();
        assert_eq!(s.overall, 1.0);
        assert!(s.per_topic.values().all(|f| *f == 1.0));
    }

    #[test]
    fn hand_confusion_fixture() {
        // topic a: gold P P C N, pred P C C C
        //   pro: tp 1, gold 2, pred 1 -> 2/3; con: tp 1, gold 1, pred 3 -> 1/2; neutral 0
        //   macro = (2/3 + 1/2) / 3 = 7/18
        // topic b: gold P C, pred P C -> pro 1, con 1, neutral absent 0 -> 2/3
        let test = vec![ex("a", Pro), ex("a", Pro), ex("a", Con), ex("a", Neutral), ex("b", Pro), ex("b", Con)];
        let preds = [Pro, Con, Con, Con, Pro, Con];
        let s = evaluate_stance(&test, &preds).unwrap();
        assert!((s.per_topic["a"] - 7.0 / 18.0).abs() < 1e-12);
        assert!((s.per_topic["b"] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.counts["a"], 4);
        // overall: pro tp 2, gold 3, pred 2 -> 4/5; con tp 2, gold 2, pred 4 -> 2/3; neutral 0
        assert!((s.overall - (0.8 + 2.0 / 3.0) / 3.0).abs() < 1e-12);
        assert!(evaluate_stance(&test, &preds[1..]).is_err());
    }

    #[test]
    fn comparison_rows() {
        let test: Vec<_> = (0..30).map(|i| ex(["a", "b"][i % 2], [Pro, Con, Neutral][i % 3])).collect();
        let gold: Vec<_> = test.iter().map(|e| e.label).collect();
        let rows = compare_systems(&test, &gold, &gold, 200, 1).unwrap();
        assert_eq!(rows[0].topic, "Overall");
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.p == 1.0 && r.f1_a == 1.0));
        let bad = vec![Pro; 30];
        let rows = compare_systems(&test, &gold, &bad, 2000, 1).unwrap();
        assert!(rows[0].p < 0.01, "{}", rows[0].p);
        assert!(comparison_csv(&rows, "BiC+C", "BiC+W").starts_with("topic,n,f1_BiC+C,f1_BiC+W,p\nOverall,30,"));
    }
}
