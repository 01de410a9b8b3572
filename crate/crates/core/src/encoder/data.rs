//! Encoder inputs from dictionary definitions, related words and pretrained
//! vectors, and the word-level train/dev/test split.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::Serialize;

use super::config::ModelConfig;
use crate::aspect::{Aspect, Label, Pos};
use crate::embeddings::Embeddings;
use crate::error::{Error, Result};
use crate::lexicon::{normalize_word, tsv_records, Lexicon, LexiconEntry, VerbFrame};
use crate::numerics::rng::substream;
use crate::numerics::Tensor;
use crate::split::{target_counts, Split};
use crate::text::content_tokens;

#[derive(Debug, Clone, PartialEq)]
pub struct Definition {
    pub source: String,
    pub text: String,
}

pub type Definitions = BTreeMap<(String, Pos), Vec<Definition>>;
pub type Related = BTreeMap<(String, Pos), Vec<String>>;

fn parse_pos(raw: &str, path: &Path, line: usize) -> Result<Pos> {
    Pos::parse_loose(raw).ok_or_else(|| Error::parse(path, line, format!("unknown part of speech `{raw}`")))
}

/// `word  pos  source  definition text`; definitions keep file order.
pub fn parse_definitions(text: &str, path: &Path) -> Result<Definitions> {
    let mut out = Definitions::new();
    for r in tsv_records(text, path, 4) {
        let (line, f) = r?;
        let pos = parse_pos(f[1], path, line)?;
        out.entry((normalize_word(f[0]), pos)).or_default().push(Definition {
            source: f[2].trim().to_string(),
            text: f[3].to_string(),
        });
    }
    Ok(out)
}

/// `word  pos  r1,r2,...`
pub fn parse_related(text: &str, path: &Path) -> Result<Related> {
    let mut out = Related::new();
    for r in tsv_records(text, path, 3) {
        let (line, f) = r?;
        let pos = parse_pos(f[1], path, line)?;
        out.entry((normalize_word(f[0]), pos))
            .or_default()
            .extend(f[2].split(',').map(normalize_word).filter(|w| !w.is_empty()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderInput {
    pub word: String,
    pub pos: Pos,
    /// Pretrained vectors of the definition tokens, in order.
    pub tokens: Vec<Vec<f64>>,
    pub related: Vec<Vec<f64>>,
    /// Pretrained vector of the headword, if it has one.
    pub pretrained: Option<Vec<f64>>,
}

impl EncoderInput {
    pub fn definition_tensor(&self) -> Result<Tensor> {
        Tensor::from_rows(&self.tokens)
    }

    pub fn related_tensor(&self) -> Result<Tensor> {
        Tensor::from_rows(&self.related)
    }

    pub fn pretrained_or_zero(&self, dim: usize) -> Vec<f64> {
        self.pretrained.clone().unwrap_or_else(|| vec![0.0; dim])
    }
}

/// Definition tokens kept for the encoder: definitions ordered by source
/// name (file order within a source), stopwords, punctuation, the headword
/// and tokens without a pretrained vector removed, truncated to `max_tokens`.
pub fn definition_tokens(word: &str, defs: &[Definition], emb: &Embeddings, max_tokens: usize) -> Vec<String> {
    let mut ordered: Vec<&Definition> = defs.iter().collect();
    ordered.sort_by(|a, b| a.source.cmp(&b.source));
    ordered
        .iter()
        .flat_map(|d| content_tokens(&d.text))
        .filter(|t| t != word && emb.contains(t))
        .take(max_tokens)
        .collect()
}

/// `None` when no definition token survives preprocessing.
pub fn build_input(
    word: &str,
    pos: Pos,
    defs: &Definitions,
    related: &Related,
    emb: &Embeddings,
    cfg: &ModelConfig,
) -> Option<EncoderInput> {
    let key = (word.to_string(), pos);
    let tokens = definition_tokens(word, defs.get(&key).map_or(&[], Vec::as_slice), emb, cfg.max_tokens);
    if tokens.is_empty() {
        return None;
    }
    let related = related
        .get(&key)
        .map(|rs| {
            rs.iter()
                .filter(|r| r.as_str() != word)
                .filter_map(|r| emb.get(r))
                .take(cfg.max_related)
                .collect()
        })
        .unwrap_or_default();
    Some(EncoderInput {
        word: word.to_string(),
        pos,
        tokens: tokens.iter().map(|t| emb.get(t).expect("filtered on presence")).collect(),
        related,
        pretrained: emb.get(word),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub input: EncoderInput,
    pub labels: BTreeMap<Aspect, Label>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct InputReport {
    pub built: usize,
    /// Words with no definition token left after preprocessing.
    pub skipped_no_tokens: usize,
    pub without_related: usize,
    pub without_pretrained: usize,
}

/// Builds one example per labeled entry, in lexicon order.
pub fn build_examples<'a>(
    entries: impl IntoIterator<Item = &'a LexiconEntry>,
    defs: &Definitions,
    related: &Related,
    emb: &Embeddings,
    cfg: &ModelConfig,
) -> (Vec<Example>, InputReport) {
    let mut report = InputReport::default();
    let mut out = Vec::new();
    for e in entries {
        if e.labels.is_empty() {
            continue;
        }
        let Some(input) = build_input(&e.word, e.pos, defs, related, emb, cfg) else {
            log::debug!("skipping ({}, {}): no definition tokens", e.word, e.pos);
            report.skipped_no_tokens += 1;
            continue;
        };
        report.without_related += usize::from(input.related.is_empty());
        report.without_pretrained += usize::from(input.pretrained.is_none());
        report.built += 1;
        out.push(Example { input, labels: e.labels.clone() });
    }
    if report.skipped_no_tokens > 0 {
        log::warn!("{} words skipped for lack of definition tokens", report.skipped_no_tokens);
    }
    (out, report)
}

/// Noun/adjective lexicon plus verb frames as one lexicon.
pub fn merge_verbs(lexicon: &Lexicon, verbs: &[VerbFrame]) -> Lexicon {
    let mut all = lexicon.clone();
    all.extend(verbs.iter().map(VerbFrame::to_entry));
    all
}

/// Word-level split: every part of speech of a word lands in the same
/// split. Verb-frame splits are kept; the other words fill the remaining
/// 60/20/20 quotas in seeded random order, each going to the split with
/// the largest remaining deficit.
pub fn split_dataset(lexicon: &Lexicon, verbs: &[VerbFrame], seed: u64) -> BTreeMap<String, Split> {
    let words: BTreeSet<&str> = lexicon
        .iter()
        .map(|e| e.word.as_str())
        .chain(verbs.iter().map(|v| v.word.as_str()))
        .collect();
    let mut assignment: BTreeMap<String, Split> = verbs
        .iter()
        .filter_map(|v| v.split.map(|s| (v.word.clone(), s)))
        .collect();
    let mut counts = [0usize; 3];
    for s in assignment.values() {
        counts[s.index()] += 1;
    }
    let targets = target_counts(words.len());
    let mut free: Vec<&str> = words.into_iter().filter(|w| !assignment.contains_key(*w)).collect();
    free.shuffle(&mut substream(seed, "word-split"));
    for w in free {
        let best = Split::ALL
            .into_iter()
            .max_by_key(|s| (targets[s.index()] as i64 - counts[s.index()] as i64, -(s.index() as i64)))
            .expect("three splits");
        counts[best.index()] += 1;
        assignment.insert(w.to_string(), best);
    }
    assignment
}

pub fn write_split<W: Write>(assignment: &BTreeMap<String, Split>, mut w: W) -> std::io::Result<()> {
    for (word, s) in assignment {
        writeln!(w, "{word}\t{}", s.as_str())?;
    }
    w.flush()
}

pub fn parse_split(text: &str, path: &Path) -> Result<BTreeMap<String, Split>> {
    let mut out = BTreeMap::new();
    for r in tsv_records(text, path, 2) {
        let (line, f) = r?;
        let s: Split = f[1].parse().map_err(|_| Error::parse(path, line, format!("unknown split `{}`", f[1])))?;
        if out.insert(normalize_word(f[0]), s).is_some() {
            return Err(Error::parse(path, line, format!("word `{}` listed twice", f[0])));
        }
    }
    Ok(out)
}

/// Examples grouped by the split of their word; words missing from the
/// assignment are dropped.
pub fn partition(examples: Vec<Example>, assignment: &BTreeMap<String, Split>) -> [Vec<Example>; 3] {
    let mut out: [Vec<Example>; 3] = Default::default();
    for ex in examples {
        if let Some(s) = assignment.get(&ex.input.word) {
            out[s.index()].push(ex);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aspect::Polarity;
    use crate::lexicon::Source;

    fn emb(words: &[&str]) -> Embeddings {
        let mut e = Embeddings::new(2);
        for (i, w) in words.iter().enumerate() {
            e.insert(w, &[i as f64, 1.0]).unwrap();
        }
        e
    }

    #[test]
    fn token_pipeline() {
        let e = emb(&["large", "animal", "dangerous", "snake"]);
        let defs = vec![
            Definition { source: "wordnet".into(), text: "A dangerous animal.".into() },
            Definition { source: "ahd".into(), text: "The snake is a large, scaly animal!".into() },
        ];
        // ahd first, headword and stopwords dropped, OOV "scaly" dropped
        assert_eq!(definition_tokens("snake", &defs, &e, 42), vec!["large", "animal", "dangerous", "animal"]);
        assert_eq!(definition_tokens("snake", &defs, &e, 2), vec!["large", "animal"]);
    }

    #[test]
    fn oov_headword_still_builds() {
        let e = emb(&["bad", "thing"]);
        let defs = parse_definitions("blorp\tnoun\tx\ta bad thing\n", Path::new("d.tsv")).unwrap();
        let rel = parse_related("blorp\tnoun\tthing,missing\n", Path::new("r.tsv")).unwrap();
        let inp = build_input("blorp", Pos::Noun, &defs, &rel, &e, &ModelConfig::default()).unwrap();
        assert_eq!(inp.tokens.len(), 2);
        assert_eq!(inp.related.len(), 1);
        assert!(inp.pretrained.is_none());
        assert!(build_input("other", Pos::Noun, &defs, &rel, &e, &ModelConfig::default()).is_none());
    }

    fn lex(words: &[(&str, Pos)]) -> Lexicon {
        words
            .iter()
            .map(|(w, p)| {
                let a = Aspect::for_pos(*p)[0];
                let l = if a.is_four_way() { Label::FourWay(0) } else { Label::Polar(Polarity::Positive) };
                LexiconEntry::new(*w, *p).with_label(a, l, Source::Hgi)
            })
            .collect()
    }

    #[test]
    fn ten_words_split_six_two_two() {
        let words: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
        let l = lex(&words.iter().map(|w| (w.as_str(), Pos::Noun)).collect::<Vec<_>>());
        let a = split_dataset(&l, &[], 5);
        let mut counts = [0; 3];
        for s in a.values() {
            counts[s.index()] += 1;
        }
        assert_eq!(counts, [6, 2, 2]);
        assert_eq!(split_dataset(&l, &[], 5), a);
    }

    #[test]
    fn parts_of_speech_share_a_split_and_verb_splits_are_kept() {
        let l = lex(&[("evil", Pos::Noun), ("evil", Pos::Adjective), ("good", Pos::Noun), ("kind", Pos::Adjective)]);
        let verbs = vec![VerbFrame {
            word: "evil".into(),
            split: Some(Split::Dev),
            labels: BTreeMap::from([(Aspect::Power, Label::FourWay(1))]),
        }];
        for seed in 0..10 {
            let a = split_dataset(&l, &verbs, seed);
            assert_eq!(a.len(), 3);
            assert_eq!(a["evil"], Split::Dev);
        }
    }

    #[test]
    fn split_file_round_trip() {
        let a = BTreeMap::from([("a".to_string(), Split::Train), ("b".to_string(), Split::Test)]);
        let mut buf = Vec::new();
        write_split(&a, &mut buf).unwrap();
        assert_eq!(parse_split(std::str::from_utf8(&buf).unwrap(), Path::new("s")).unwrap(), a);
        assert!(parse_split("a\ttrain\na\tdev\n", Path::new("s")).is_err());
    }
}
