use std::collections::BTreeMap;

use serde::Serialize;

use super::Lexicon;
use crate::aspect::{Aspect, Label, Polarity};
use crate::error::{Error, Result};

/// Percentages of each polarity for one aspect.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ClassShares {
    pub positive: f64,
    pub negative: f64,
    pub neutral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassDistribution {
    pub fully_labeled: usize,
    pub aspects: BTreeMap<Aspect, ClassShares>,
    /// Percent of fully-labeled words with at least one emotion.
    pub emotion_coverage: f64,
    /// Mean number of emotions among words that have any.
    pub mean_emotions: f64,
}

/// Class distribution over the fully-labeled noun/adjective entries.
pub fn class_distribution(lexicon: &Lexicon) -> Result<ClassDistribution> {
    let full: Vec<_> = lexicon.fully_labeled().filter(|e| e.pos.is_noun_or_adjective()).collect();
    if full.is_empty() {
        return Err(Error::InvalidInput("lexicon has no fully-labeled nouns or adjectives".into()));
    }
    let n = full.len() as f64;
    let mut aspects = BTreeMap::new();
    for aspect in Aspect::NOUN_ADJ.into_iter().filter(|a| !a.is_emotion()) {
        let count = |p: Polarity| {
            full.iter().filter(|e| e.label(aspect) == Some(&Label::Polar(p))).count() as f64
        };
        aspects.insert(
            aspect,
            ClassShares {
                positive: 100.0 * count(Polarity::Positive) / n,
                negative: 100.0 * count(Polarity::Negative) / n,
                neutral: 100.0 * count(Polarity::Neutral) / n,
            },
        );
    }
    let sizes: Vec<usize> = full
        .iter()
        .filter_map(|e| e.label(Aspect::Emotion).and_then(Label::emotions))
        .map(|s| s.len())
        .filter(|&k| k > 0)
        .collect();
    let mean_emotions = if sizes.is_empty() {
        0.0
    } else {
        sizes.iter().sum::<usize>() as f64 / sizes.len() as f64
    };
    Ok(ClassDistribution {
        fully_labeled: full.len(),
        aspects,
        emotion_coverage: 100.0 * sizes.len() as f64 / n,
        mean_emotions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aspect::{EmotionSet, Pos};
    use crate::lexicon::{LexiconEntry, Source};

    fn full_entry(word: &str, sentiment: Polarity, emotions: &[&str]) -> LexiconEntry {
        let mut e = LexiconEntry::new(word, Pos::Noun);
        for a in Aspect::NOUN_ADJ {
            let label = match a {
                Aspect::Emotion => Label::Emotions(EmotionSet::from_names(emotions.iter().copied()).unwrap()),
                Aspect::Sentiment => Label::Polar(sentiment),
                _ => Label::Polar(Polarity::Neutral),
            };
            e = e.with_label(a, label, Source::Hgi);
        }
        e
    }

    #[test]
    fn direct_count() {
        let mut lex = Lexicon::new();
        for i in 0..10 {
            let s = if i < 3 { Polarity::Positive } else if i < 5 { Polarity::Negative } else { Polarity::Neutral };
            let emo: &[&str] = if i == 0 { &["joy", "trust"] } else if i == 1 { &["fear"] } else { &[] };
            lex.insert(full_entry(&format!("w{i}"), s, emo));
        }
        // a partially labeled entry must not count
        lex.insert(LexiconEntry::new("partial", Pos::Noun).with_label(
            Aspect::Sentiment,
            Label::Polar(Polarity::Positive),
            Source::Cwn,
        ));
        let d = class_distribution(&lex).unwrap();
        assert_eq!(d.fully_labeled, 10);
        let s = d.aspects[&Aspect::Sentiment];
        assert_eq!((s.positive, s.negative, s.neutral), (30.0, 20.0, 50.0));
        assert_eq!(d.emotion_coverage, 20.0);
        assert_eq!(d.mean_emotions, 1.5);
        let sv = d.aspects[&Aspect::SocialValue];
        assert_eq!((sv.positive, sv.negative), (0.0, 0.0));
        for shares in d.aspects.values() {
            assert!((shares.positive + shares.negative + shares.neutral - 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn no_fully_labeled_is_an_error() {
        let mut lex = Lexicon::new();
        lex.insert(LexiconEntry::new("x", Pos::Noun));
        assert!(class_distribution(&lex).is_err());
    }
}
