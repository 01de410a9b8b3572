//! Synonym paraphrase selection and connotation divergence between synonyms.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::aspect::{Aspect, Pos};
use crate::error::{Error, Result};
use crate::lexicon::{normalize_word, tsv_records, Lexicon};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SynonymPair {
    pub word_a: String,
    pub word_b: String,
    pub pos: Pos,
}

impl SynonymPair {
    /// Canonical orientation: `word_a < word_b`.
    pub fn new(w1: &str, w2: &str, pos: Pos) -> Self {
        let (a, b) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
        SynonymPair {
            word_a: a.to_string(),
            word_b: b.to_string(),
            pos,
        }
    }
}

/// A PPDB lexical paraphrase row.
#[derive(Debug, Clone, PartialEq)]
pub struct Paraphrase {
    pub w1: String,
    pub w2: String,
    pub pos: Option<Pos>,
}

pub fn parse_ppdb(text: &str, path: &Path) -> Result<Vec<Paraphrase>> {
    tsv_records(text, path, 3)
        .map(|r| {
            let (_, f) = r?;
            Ok(Paraphrase {
                w1: normalize_word(f[0]),
                w2: normalize_word(f[1]),
                pos: Pos::parse_loose(f[2]),
            })
        })
        .collect()
}

/// Synset membership: `word -> synonyms`.
pub type Synsets = HashMap<String, HashSet<String>>;

/// Parses `word<TAB>syn1,syn2,...` and closes the relation under symmetry.
pub fn parse_synsets(text: &str, path: &Path) -> Result<Synsets> {
    let mut map: Synsets = HashMap::new();
    for r in tsv_records(text, path, 2) {
        let (line, f) = r?;
        let word = normalize_word(f[0]);
        if word.is_empty() {
            return Err(Error::parse(path, line, "empty word"));
        }
        for syn in f[1].split(',').map(normalize_word).filter(|s| !s.is_empty()) {
            map.entry(word.clone()).or_default().insert(syn.clone());
            map.entry(syn).or_default().insert(word.clone());
        }
    }
    Ok(map)
}

/// Keeps paraphrases where one word is in the other's synset and both words
/// are in the lexicon under the paraphrase's part of speech.
pub fn select_pairs(paraphrases: &[Paraphrase], synsets: &Synsets, lexicon: &Lexicon) -> Vec<SynonymPair> {
    let in_synset = |a: &str, b: &str| synsets.get(a).is_some_and(|s| s.contains(b));
    let pairs: BTreeSet<SynonymPair> = paraphrases
        .iter()
        .filter(|p| p.w1 != p.w2)
        .filter_map(|p| p.pos.map(|pos| (p, pos)))
        .filter(|(p, _)| in_synset(&p.w1, &p.w2) || in_synset(&p.w2, &p.w1))
        .filter(|(p, pos)| lexicon.contains(&p.w1, *pos) && lexicon.contains(&p.w2, *pos))
        .map(|(p, pos)| SynonymPair::new(&p.w1, &p.w2, pos))
        .collect();
    pairs.into_iter().collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AspectDivergence {
    pub compared: usize,
    pub same: usize,
    pub different: usize,
    /// Differences where exactly one side is neutral (empty set for emotions).
    pub neutral_vs_nonneutral: usize,
    /// Pairs skipped because a label was missing on either side.
    pub skipped: usize,
}

impl AspectDivergence {
    pub fn pct_same(&self) -> f64 {
        pct(self.same, self.compared)
    }

    pub fn pct_different(&self) -> f64 {
        pct(self.different, self.compared)
    }

    pub fn pct_neutral_among_differences(&self) -> f64 {
        pct(self.neutral_vs_nonneutral, self.different)
    }
}

fn pct(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub pairs: usize,
    pub aspects: BTreeMap<Aspect, AspectDivergence>,
    /// Pairs differing in at least one aspect where both labels exist.
    pub any_different: usize,
}

impl DivergenceReport {
    pub fn pct_any_different(&self) -> f64 {
        pct(self.any_different, self.pairs)
    }

    /// Mean over aspects with differences of the neutral-vs-non-neutral share.
    pub fn mean_pct_neutral_among_differences(&self) -> f64 {
        let vals: Vec<f64> = self
            .aspects
            .values()
            .filter(|d| d.different > 0)
            .map(|d| d.pct_neutral_among_differences())
            .collect();
        if vals.is_empty() {
            0.0
        } else {
            vals.iter().sum::<f64>() / vals.len() as f64
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("aspect,compared,skipped,pct_same,pct_diff,pct_neutral_vs_nonneutral\n");
        for (a, d) in &self.aspects {
            let _ = writeln!(
                out,
                "{a},{},{},{:.4},{:.4},{:.4}",
                d.compared,
                d.skipped,
                d.pct_same(),
                d.pct_different(),
                d.pct_neutral_among_differences()
            );
        }
        let _ = writeln!(out, "any,{},0,{:.4},{:.4},", self.pairs, 100.0 - self.pct_any_different(), self.pct_any_different());
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<14} {:>8} {:>8} {:>8} {:>10}\n",
            "aspect", "pairs", "%same", "%diff", "%neu/diff"
        );
        for (a, d) in &self.aspects {
            let _ = writeln!(
                out,
                "{:<14} {:>8} {:>8.1} {:>8.1} {:>10.1}",
                a.as_str(),
                d.compared,
                d.pct_same(),
                d.pct_different(),
                d.pct_neutral_among_differences()
            );
        }
        let _ = writeln!(
            out,
            "{} pairs, {:.1}% differ in some aspect",
            self.pairs,
            self.pct_any_different()
        );
        out
    }
}

pub fn divergence_report(pairs: &[SynonymPair], lexicon: &Lexicon) -> Result<DivergenceReport> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no synonym pairs to analyze".into()));
    }
    let mut aspects: BTreeMap<Aspect, AspectDivergence> =
        Aspect::NOUN_ADJ.iter().map(|a| (*a, AspectDivergence::default())).collect();
    let mut any_different = 0;
    for pair in pairs {
        let a = lexicon.get(&pair.word_a, pair.pos);
        let b = lexicon.get(&pair.word_b, pair.pos);
        let mut differs = false;
        for (aspect, stats) in aspects.iter_mut() {
            let la = a.and_then(|e| e.label(*aspect));
            let lb = b.and_then(|e| e.label(*aspect));
            let (Some(la), Some(lb)) = (la, lb) else {
                stats.skipped += 1;
                continue;
            };
            stats.compared += 1;
            if la == lb {
                stats.same += 1;
            } else {
                stats.different += 1;
                differs = true;
                if la.is_neutral() != lb.is_neutral() {
                    stats.neutral_vs_nonneutral += 1;
                }
            }
        }
        any_different += usize::from(differs);
    }
    Ok(DivergenceReport {
        pairs: pairs.len(),
        aspects,
        any_different,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aspect::{EmotionSet, Label, Polarity};
    use crate::lexicon::{LexiconEntry, Source};

    fn entry(word: &str, sent: i64, emo: &[&str]) -> LexiconEntry {
        LexiconEntry::new(word, Pos::Noun)
            .with_label(Aspect::Sentiment, Label::Polar(Polarity::from_value(sent).unwrap()), Source::Cwn)
            .with_label(
                Aspect::Emotion,
                Label::Emotions(EmotionSet::from_names(emo.iter().copied()).unwrap()),
                Source::Nrc,
            )
    }

    fn para(a: &str, b: &str) -> Paraphrase {
        Paraphrase { w1: a.into(), w2: b.into(), pos: Some(Pos::Noun) }
    }

    #[test]
    fn selection() {
        let lex: Lexicon = [entry("hurry", 0, &[]), entry("rush", 0, &[]), entry("dash", 0, &[])]
            .into_iter()
            .collect();
        let synsets = parse_synsets("hurry\trush\n", Path::new("s.tsv")).unwrap();
        let pairs = select_pairs(
            &[para("hurry", "rush"), para("rush", "hurry"), para("hurry", "dash"), para("rush", "missing")],
            &synsets,
            &lex,
        );
        assert_eq!(pairs, vec![SynonymPair::new("hurry", "rush", Pos::Noun)]);
        // POS mismatch with the lexicon drops the pair
        let adj = Paraphrase { pos: Some(Pos::Adjective), ..para("hurry", "rush") };
        assert!(select_pairs(&[adj], &synsets, &lex).is_empty());
    }

    #[test]
    fn four_pairs_three_differ() {
        let lex: Lexicon = [
            entry("a1", 1, &["joy"]),
            entry("a2", 1, &["joy"]),
            entry("b1", 1, &[]),
            entry("b2", 0, &[]),
            entry("c1", -1, &["fear"]),
            entry("c2", 1, &["fear"]),
            entry("d1", 0, &["fear"]),
            entry("d2", 0, &["fear", "sadness"]),
        ]
        .into_iter()
        .collect();
        let pairs: Vec<_> = ["a", "b", "c", "d"]
            .iter()
            .map(|p| SynonymPair::new(&format!("{p}1"), &format!("{p}2"), Pos::Noun))
            .collect();
        let r = divergence_report(&pairs, &lex).unwrap();
        assert_eq!(r.pct_any_different(), 75.0);
        let s = &r.aspects[&Aspect::Sentiment];
        assert_eq!((s.same, s.different, s.neutral_vs_nonneutral), (2, 2, 1));
        let e = &r.aspects[&Aspect::Emotion];
        assert_eq!((e.same, e.different, e.neutral_vs_nonneutral), (3, 1, 0));
        // social value is missing everywhere
        assert_eq!(r.aspects[&Aspect::SocialValue].skipped, 4);

        let mut shuffled: Vec<_> = pairs.iter().rev().cloned().collect();
        for p in &mut shuffled {
            std::mem::swap(&mut p.word_a, &mut p.word_b);
        }
        assert_eq!(divergence_report(&shuffled, &lex).unwrap(), r);
        for d in r.aspects.values().filter(|d| d.compared > 0) {
            assert!((d.pct_same() + d.pct_different() - 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_pairs_is_an_error() {
        assert!(divergence_report(&[], &Lexicon::new()).is_err());
    }
}
