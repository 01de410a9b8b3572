use std::collections::{BTreeMap, BTreeSet};

use log::warn;

use super::rules::RuleTable;
use super::sources::{HgiRecord, Sources};
use super::{Lexicon, LexiconEntry, Provenance, Source};
use crate::aspect::{Aspect, EmotionSet, Label, Polarity, Pos};
use crate::error::{Error, Result};

/// Affine map of `raw` from `[observed_min, observed_max]` onto `[-1, 1]`.
pub fn normalize_scale(raw: f64, observed_min: f64, observed_max: f64) -> Result<f64> {
    if observed_min == observed_max {
        return Err(Error::ConstantScale(observed_min));
    }
    if observed_min > observed_max || raw < observed_min || raw > observed_max {
        return Err(Error::InvalidInput(format!(
            "value {raw} outside observed range [{observed_min}, {observed_max}]"
        )));
    }
    if raw == observed_max {
        return Ok(1.0);
    }
    Ok(2.0 * (raw - observed_min) / (observed_max - observed_min) - 1.0)
}

/// Three-way label of a score in `[-1, 1]`; the thresholds themselves are
/// non-neutral.
pub fn threshold_label(x: f64, theta: f64) -> Polarity {
    if x <= -theta {
        Polarity::Negative
    } else if x >= theta {
        Polarity::Positive
    } else {
        Polarity::Neutral
    }
}

/// Labels derived from one General Inquirer sense.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SenseLabels {
    pub labels: BTreeMap<Aspect, Polarity>,
    pub conflict: bool,
    /// Categories not referenced anywhere in the rule table.
    pub unknown_categories: usize,
}

pub fn map_hgi_sense(record: &HgiRecord, rules: &RuleTable) -> SenseLabels {
    let unknown_categories = record.categories.iter().filter(|c| !rules.is_known(c)).count();
    let aspects: BTreeSet<Aspect> = record
        .categories
        .iter()
        .flat_map(|c| rules.aspects_for(c))
        .collect();
    let resolution = rules.resolve_polarity(&record.categories);
    SenseLabels {
        labels: aspects.into_iter().map(|a| (a, resolution.polarity)).collect(),
        conflict: resolution.conflict,
        unknown_categories,
    }
}

/// Majority vote over the non-neutral labels; ties and all-neutral lists
/// give neutral.
pub fn aggregate_senses(labels: &[Polarity]) -> Polarity {
    let pos = labels.iter().filter(|&&l| l == Polarity::Positive).count();
    let neg = labels.iter().filter(|&&l| l == Polarity::Negative).count();
    match pos.cmp(&neg) {
        std::cmp::Ordering::Greater => Polarity::Positive,
        std::cmp::Ordering::Less => Polarity::Negative,
        std::cmp::Ordering::Equal => Polarity::Neutral,
    }
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct CompileReport {
    pub hgi_senses: usize,
    /// Records whose part of speech is not noun or adjective.
    pub skipped_pos: usize,
    pub unknown_categories: usize,
    pub conflicting_senses: usize,
    /// Words from POS-less sources (DAL, NRC) with no noun/adjective entry
    /// in a POS-bearing source.
    pub unattached_words: usize,
    pub entries: usize,
    pub fully_labeled: usize,
}

#[derive(Default)]
struct Draft {
    hgi: BTreeMap<Aspect, (Vec<Polarity>, bool)>,
    sentiment: Vec<Polarity>,
}

/// Builds the noun/adjective lexicon from parsed sources.
///
/// Social value, politeness and impact come from GI senses, factuality from
/// DAL imagery, sentiment from CWN polarity and emotions from NRC. DAL and
/// NRC carry no part of speech; their labels attach to every noun/adjective
/// key that GI or CWN establishes for the word.
pub fn compile_lexicon(sources: &Sources, rules: &RuleTable) -> Result<(Lexicon, CompileReport)> {
    rules.validate()?;
    let mut report = CompileReport::default();
    let mut drafts: BTreeMap<(String, Pos), Draft> = BTreeMap::new();

    for rec in &sources.hgi {
        let Some(pos) = rec.pos.filter(|p| p.is_noun_or_adjective()) else {
            report.skipped_pos += 1;
            continue;
        };
        report.hgi_senses += 1;
        let sense = map_hgi_sense(rec, rules);
        report.unknown_categories += sense.unknown_categories;
        if sense.conflict {
            report.conflicting_senses += 1;
        }
        let draft = drafts.entry((rec.word.clone(), pos)).or_default();
        for (aspect, pol) in sense.labels {
            let slot = draft.hgi.entry(aspect).or_default();
            slot.0.push(pol);
            slot.1 |= sense.conflict;
        }
    }

    for rec in &sources.cwn {
        let Some(pos) = rec.pos.filter(|p| p.is_noun_or_adjective()) else {
            report.skipped_pos += 1;
            continue;
        };
        let x = 2.0 * rec.score - 1.0;
        drafts
            .entry((rec.word.clone(), pos))
            .or_default()
            .sentiment
            .push(threshold_label(x, rules.theta_sentiment));
    }
    if report.unknown_categories > 0 {
        warn!("{} GI categories not in the rule table were ignored", report.unknown_categories);
    }

    let mut pos_by_word: BTreeMap<&str, Vec<Pos>> = BTreeMap::new();
    for (word, pos) in drafts.keys() {
        pos_by_word.entry(word.as_str()).or_default().push(*pos);
    }

    let mut factuality: BTreeMap<&str, Vec<Polarity>> = BTreeMap::new();
    if !sources.dal.is_empty() {
        let (min, max) = sources
            .dal
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r.imagery), hi.max(r.imagery))
            });
        for rec in &sources.dal {
            let x = normalize_scale(rec.imagery, min, max)?;
            factuality
                .entry(rec.word.as_str())
                .or_default()
                .push(threshold_label(x, rules.theta_factuality));
        }
    }

    let mut emotions: BTreeMap<&str, EmotionSet> = BTreeMap::new();
    for rec in &sources.nrc {
        let Some(i) = EmotionSet::index_of(&rec.emotion) else {
            continue;
        };
        let set = emotions.entry(rec.word.as_str()).or_default();
        if rec.flag {
            set.set(i, true);
        }
    }

    report.unattached_words = factuality
        .keys()
        .chain(emotions.keys())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|w| !pos_by_word.contains_key(**w))
        .count();

    let mut lexicon = Lexicon::new();
    for ((word, pos), draft) in &drafts {
        let mut entry = LexiconEntry::new(word.clone(), *pos);
        for (aspect, (senses, conflict)) in &draft.hgi {
            let label = aggregate_senses(senses);
            let prov = Provenance {
                source: Source::Hgi,
                conflict: *conflict && label.is_neutral(),
            };
            entry.set_label(*aspect, Label::Polar(label), prov);
        }
        if !draft.sentiment.is_empty() {
            let label = aggregate_senses(&draft.sentiment);
            entry.set_label(Aspect::Sentiment, Label::Polar(label), Provenance::new(Source::Cwn));
        }
        if let Some(labels) = factuality.get(word.as_str()) {
            let label = aggregate_senses(labels);
            entry.set_label(Aspect::Factuality, Label::Polar(label), Provenance::new(Source::Dal));
        }
        if let Some(set) = emotions.get(word.as_str()) {
            entry.set_label(Aspect::Emotion, Label::Emotions(*set), Provenance::new(Source::Nrc));
        }
        if !entry.labels.is_empty() {
            lexicon.insert(entry);
        }
    }
    report.entries = lexicon.len();
    report.fully_labeled = lexicon.fully_labeled().count();
    Ok((lexicon, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hgi(cats: &[&str]) -> HgiRecord {
        HgiRecord {
            word: "w".into(),
            sense: "1".into(),
            pos: Some(Pos::Noun),
            categories: cats.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_scale(2.0, 1.0, 3.0).unwrap(), 0.0);
        assert_eq!(normalize_scale(3.0, 1.0, 3.0).unwrap(), 1.0);
        assert_eq!(normalize_scale(1.0, 1.0, 3.0).unwrap(), -1.0);
        // 2 * (1.5 - 1) / (3 - 1) - 1
        assert_eq!(normalize_scale(1.5, 1.0, 3.0).unwrap(), -0.5);
        assert!(matches!(normalize_scale(1.0, 2.0, 2.0), Err(Error::ConstantScale(_))));
        assert!(normalize_scale(4.0, 1.0, 3.0).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_label(0.25, 0.25), Polarity::Positive);
        assert_eq!(threshold_label(0.0, 0.25), Polarity::Neutral);
        assert_eq!(threshold_label(-0.3, 0.25), Polarity::Negative);
        assert_eq!(threshold_label(-0.25, 0.25), Polarity::Negative);
        assert_eq!(threshold_label(0.249, 0.25), Polarity::Neutral);
    }

    #[test]
    fn hgi_sense_examples() {
        let rules = RuleTable::default();
        let s = map_hgi_sense(&hgi(&["PowAuth", "Positiv"]), &rules);
        assert_eq!(s.labels, BTreeMap::from([(Aspect::SocialValue, Polarity::Positive)]));
        let s = map_hgi_sense(&hgi(&["Fail", "Negativ"]), &rules);
        assert_eq!(s.labels, BTreeMap::from([(Aspect::SocialValue, Polarity::Negative)]));
        let s = map_hgi_sense(&hgi(&["Positiv", "Negativ", "PowAuth"]), &rules);
        assert_eq!(s.labels, BTreeMap::from([(Aspect::SocialValue, Polarity::Neutral)]));
        assert!(s.conflict);
        let s = map_hgi_sense(&hgi(&["Noun", "PowAuth"]), &rules);
        assert_eq!(s.unknown_categories, 1);
        assert!(map_hgi_sense(&hgi(&["Positiv"]), &rules).labels.is_empty());
    }

    #[test]
    fn aggregate_examples() {
        use Polarity::*;
        assert_eq!(aggregate_senses(&[Positive, Positive, Negative]), Positive);
        assert_eq!(aggregate_senses(&[Positive, Negative]), Neutral);
        assert_eq!(aggregate_senses(&[Neutral, Neutral, Neutral]), Neutral);
        assert_eq!(aggregate_senses(&[Neutral, Negative, Neutral]), Negative);
    }

    /// Counts votes directly, independent of the implementation.
    fn majority_oracle(labels: &[Polarity]) -> Polarity {
        let sum: i32 = labels.iter().map(|l| l.value() as i32).sum();
        Polarity::from_sign(sum as f64)
    }

    fn polarity() -> impl Strategy<Value = Polarity> {
        prop_oneof![Just(Polarity::Negative), Just(Polarity::Neutral), Just(Polarity::Positive)]
    }

    proptest! {
        #[test]
        fn threshold_is_odd(x in -1.0f64..=1.0, theta in 0.01f64..0.99) {
            prop_assert_eq!(threshold_label(-x, theta), threshold_label(x, theta).negate());
        }

        #[test]
        fn aggregate_is_permutation_invariant(
            mut labels in prop::collection::vec(polarity(), 1..12),
            seed in any::<u64>(),
        ) {
            let expected = aggregate_senses(&labels);
            prop_assert_eq!(expected, majority_oracle(&labels));
            let n = labels.len();
            labels.rotate_left((seed as usize) % n);
            labels.reverse();
            prop_assert_eq!(aggregate_senses(&labels), expected);
        }
    }

    #[test]
    fn empty_sources_give_empty_lexicon() {
        let (lex, report) = compile_lexicon(&Sources::default(), &RuleTable::default()).unwrap();
        assert!(lex.is_empty());
        assert_eq!(report.entries, 0);
    }
}
