//! Stance corpus: loading, preprocessing, author-disjoint splits, neutral
//! generation and per-topic truncation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::aspect::Pos;
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::numerics::rng::substream;
use crate::text::{content_tokens, is_stopword, tokenize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StanceLabel {
    Con,
    Pro,
    Neutral,
}

impl StanceLabel {
    pub const ALL: [StanceLabel; 3] = [StanceLabel::Con, StanceLabel::Pro, StanceLabel::Neutral];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<StanceLabel> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StanceLabel::Con => "con",
            StanceLabel::Pro => "pro",
            StanceLabel::Neutral => "neutral",
        }
    }
}

impl fmt::Display for StanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StanceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "con" => Ok(StanceLabel::Con),
            "pro" => Ok(StanceLabel::Pro),
            "neutral" => Ok(StanceLabel::Neutral),
            _ => Err(Error::InvalidInput(format!("unknown stance label `{s}`"))),
        }
    }
}

/// A preprocessed token and its part-of-speech tag as given in the input
/// (Penn or Universal tags, or the fallback tagger's output).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub word: String,
    pub tag: String,
}

impl Token {
    /// Noun, adjective or verb; `None` for every other tag.
    pub fn pos(&self) -> Option<Pos> {
        Pos::parse_loose(&self.tag)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StanceExample {
    pub topic: String,
    pub topic_tokens: Vec<String>,
    pub tokens: Vec<Token>,
    pub label: StanceLabel,
    pub author: String,
}

/// One line of `stance.jsonl`. `pos_tags`, when present, has one tag per
/// whitespace-separated token of `text`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StanceRecord {
    pub topic: String,
    pub text: String,
    #[serde(default)]
    pub pos_tags: Option<Vec<String>>,
    pub label: StanceLabel,
    pub author: String,
}

/// Tags untagged text from a word list, falling back to suffix rules.
#[derive(Debug, Clone, Default)]
pub struct FallbackTagger {
    words: HashMap<String, Pos>,
}

impl FallbackTagger {
    /// Uses every lexicon entry; a word listed under several parts of
    /// speech keeps the first in noun, adjective, verb order.
    pub fn from_lexicon(lexicon: &Lexicon) -> Self {
        let mut words = HashMap::new();
        for e in lexicon.iter() {
            let slot = words.entry(e.word.clone()).or_insert(e.pos);
            if e.pos < *slot {
                *slot = e.pos;
            }
        }
        FallbackTagger { words }
    }

    pub fn tag(&self, word: &str) -> &'static str {
        let w = word.to_lowercase();
        if let Some(p) = self.words.get(&w) {
            return match p {
                Pos::Noun => "NN",
                Pos::Adjective => "JJ",
                Pos::Verb => "VB",
            };
        }
        if w.chars().all(|c| c.is_ascii_digit()) {
            "CD"
        } else if w.ends_with("ly") {
            "RB"
        } else if w.ends_with("ing") || w.ends_with("ed") || w.ends_with("ize") || w.ends_with("ise") {
            "VB"
        } else if ["ous", "ful", "ive", "able", "ible", "al", "ic", "less"].iter().any(|s| w.ends_with(s)) {
            "JJ"
        } else {
            "NN"
        }
    }
}

fn topic_tokens(topic: &str) -> Vec<String> {
    let t = content_tokens(topic);
    if t.is_empty() {
        tokenize(topic)
    } else {
        t
    }
}

/// Lowercases, strips punctuation and drops stopwords. Each surface token
/// keeps its tag for every piece it splits into. Returns `None` when nothing
/// is left of the text or the topic.
pub fn preprocess(rec: &StanceRecord, tagger: &FallbackTagger) -> Result<Option<StanceExample>> {
    let surface: Vec<&str> = rec.text.split_whitespace().collect();
    if let Some(tags) = &rec.pos_tags {
        if tags.len() != surface.len() {
            return Err(Error::InvalidInput(format!(
                "{} POS tags for {} tokens",
                tags.len(),
                surface.len()
            )));
        }
    }
    let mut tokens = Vec::new();
    for (i, s) in surface.iter().enumerate() {
        for word in tokenize(s).into_iter().filter(|w| !is_stopword(w)) {
            let tag = match &rec.pos_tags {
                Some(tags) => tags[i].clone(),
                None => tagger.tag(&word).to_string(),
            };
            tokens.push(Token { word, tag });
        }
    }
    let topic_tokens = topic_tokens(&rec.topic);
    if tokens.is_empty() || topic_tokens.is_empty() {
        return Ok(None);
    }
    Ok(Some(StanceExample {
        topic: rec.topic.trim().to_string(),
        topic_tokens,
        tokens,
        label: rec.label,
        author: rec.author.clone(),
    }))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LoadReport {
    pub records: usize,
    /// Records with nothing left after preprocessing.
    pub empty: usize,
    pub tagged_by_fallback: usize,
}

pub fn read_stance<R: BufRead>(r: R, path: &Path, tagger: &FallbackTagger) -> Result<(Vec<StanceExample>, LoadReport)> {
    let mut out = Vec::new();
    let mut report = LoadReport::default();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: StanceRecord =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        report.records += 1;
        if rec.pos_tags.is_none() {
            report.tagged_by_fallback += 1;
        }
        match preprocess(&rec, tagger).map_err(|e| Error::parse(path, i + 1, e.to_string()))? {
            Some(ex) => out.push(ex),
            None => report.empty += 1,
        }
    }
    Ok((out, report))
}

pub fn load_stance(path: &Path, tagger: &FallbackTagger) -> Result<(Vec<StanceExample>, LoadReport)> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_stance(std::io::BufReader::new(f), path, tagger)
}

/// Preprocessed examples, one JSON object per line.
pub fn write_examples<W: Write>(examples: &[StanceExample], mut w: W) -> Result<()> {
    for ex in examples {
        serde_json::to_writer(&mut w, ex)?;
        w.write_all(b"\n").map_err(|e| Error::io("<stance output>", e))?;
    }
    Ok(())
}

pub fn read_examples<R: BufRead>(r: R, path: &Path) -> Result<Vec<StanceExample>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let ex: StanceExample =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        if ex.tokens.is_empty() || ex.topic_tokens.is_empty() {
            return Err(Error::parse(path, i + 1, "example without tokens"));
        }
        out.push(ex);
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StanceSplits {
    pub train: Vec<StanceExample>,
    pub dev: Vec<StanceExample>,
    pub test: Vec<StanceExample>,
}

impl StanceSplits {
    pub fn named(&self) -> [(&'static str, &Vec<StanceExample>); 3] {
        [("train", &self.train), ("dev", &self.dev), ("test", &self.test)]
    }

    pub fn named_mut(&mut self) -> [(&'static str, &mut Vec<StanceExample>); 3] {
        [("train", &mut self.train), ("dev", &mut self.dev), ("test", &mut self.test)]
    }
}

pub const SPLIT_SHARES: [f64; 3] = [0.6, 0.2, 0.2];

/// Partitions authors so that no author appears in two splits. Authors are
/// visited largest first (seeded shuffle among equal sizes) and each goes to
/// the split furthest below its 60/20/20 share of examples; ties go to
/// train, then dev, then test.
pub fn build_splits(examples: &[StanceExample], seed: u64) -> Result<StanceSplits> {
    if examples.is_empty() {
        return Err(Error::InvalidInput("empty stance corpus".into()));
    }
    let mut by_author: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, ex) in examples.iter().enumerate() {
        if ex.author.is_empty() {
            return Err(Error::InvalidInput(format!("example {i} has no author id")));
        }
        by_author.entry(ex.author.as_str()).or_default().push(i);
    }
    let total = examples.len() as f64;
    let mut authors: Vec<(&str, Vec<usize>)> = by_author.into_iter().collect();
    authors.shuffle(&mut substream(seed, "stance-split"));
    authors.sort_by_key(|(_, idx)| std::cmp::Reverse(idx.len()));
    if let Some((a, idx)) = authors.first() {
        if idx.len() as f64 > SPLIT_SHARES[0] * total {
            log::warn!("author `{a}` owns {} of {} examples; split shares will be off", idx.len(), total);
        }
    }
    let mut counts = [0usize; 3];
    let mut assigned: [Vec<usize>; 3] = Default::default();
    for (_, idx) in authors {
        let mut best = 0;
        let mut best_deficit = f64::NEG_INFINITY;
        for s in 0..3 {
            let deficit = SPLIT_SHARES[s] * total - counts[s] as f64;
            if deficit > best_deficit {
                best = s;
                best_deficit = deficit;
            }
        }
        counts[best] += idx.len();
        assigned[best].extend(idx);
    }
    let [tr, dv, te] = assigned.map(|mut idx| {
        idx.sort_unstable();
        idx.into_iter().map(|i| examples[i].clone()).collect::<Vec<_>>()
    });
    Ok(StanceSplits { train: tr, dev: dv, test: te })
}

/// Neutral examples made from randomly chosen pro/con examples whose topic
/// is replaced by a different topic drawn from the empirical topic
/// distribution of `examples`, renormalized without the original topic.
pub fn generate_neutrals(examples: &[StanceExample], target_count: usize, seed: u64) -> Result<Vec<StanceExample>> {
    let mut topic_counts: BTreeMap<&str, (usize, &[String])> = BTreeMap::new();
    for ex in examples {
        topic_counts.entry(ex.topic.as_str()).or_insert((0, &ex.topic_tokens)).0 += 1;
    }
    if topic_counts.len() < 2 {
        return Err(Error::InvalidInput("neutral generation needs at least two topics".into()));
    }
    let sources: Vec<&StanceExample> = examples.iter().filter(|e| e.label != StanceLabel::Neutral).collect();
    if sources.is_empty() && target_count > 0 {
        return Err(Error::InvalidInput("no pro/con examples to build neutrals from".into()));
    }
    let topics: Vec<(&str, usize, &[String])> = topic_counts.iter().map(|(t, (n, tok))| (*t, *n, *tok)).collect();
    let total: usize = topics.iter().map(|t| t.1).sum();
    let mut rng = substream(seed, "neutrals");
    let mut out = Vec::with_capacity(target_count);
    for _ in 0..target_count {
        let src = sources[rng.gen_range(0..sources.len())];
        let own = topic_counts[src.topic.as_str()].0;
        let mut r = rng.gen_range(0..total - own);
        let (topic, _, tokens) = topics
            .iter()
            .filter(|t| t.0 != src.topic)
            .find(|t| {
                if r < t.1 {
                    true
                } else {
                    r -= t.1;
                    false
                }
            })
            .expect("draw within the renormalized mass");
        out.push(StanceExample {
            topic: topic.to_string(),
            topic_tokens: tokens.to_vec(),
            label: StanceLabel::Neutral,
            ..src.clone()
        });
    }
    Ok(out)
}

/// Appends `ratio * #(pro+con)` generated neutrals to every split, drawing
/// each split's neutrals from that split only.
pub fn add_neutrals(splits: &mut StanceSplits, ratio: f64, seed: u64) -> Result<()> {
    for (name, exs) in splits.named_mut() {
        if exs.is_empty() {
            continue;
        }
        let polar = exs.iter().filter(|e| e.label != StanceLabel::Neutral).count();
        let target = (ratio * polar as f64).round() as usize;
        let neutrals = generate_neutrals(exs, target, crate::numerics::rng::derive_seed(seed, crate::numerics::rng::tag(name)))?;
        exs.extend(neutrals);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Scenario {
    #[default]
    AllData,
    TruncTrain,
    TruncAll,
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "alldata" | "all" => Ok(Scenario::AllData),
            "trunctrain" => Ok(Scenario::TruncTrain),
            "truncall" => Ok(Scenario::TruncAll),
            _ => Err(Error::InvalidInput(format!("unknown scenario `{s}`"))),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::AllData => "AllData",
            Scenario::TruncTrain => "TruncTrain",
            Scenario::TruncAll => "TruncAll",
        })
    }
}

/// Keeps at most `cap` examples per topic, sampled uniformly without
/// replacement; survivors keep their original order.
pub fn cap_topics(examples: &[StanceExample], cap: usize, seed: u64, split: &str) -> Vec<StanceExample> {
    let mut by_topic: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, ex) in examples.iter().enumerate() {
        by_topic.entry(ex.topic.as_str()).or_default().push(i);
    }
    let mut keep = vec![false; examples.len()];
    for (topic, idx) in by_topic {
        if idx.len() <= cap {
            idx.iter().for_each(|&i| keep[i] = true);
            continue;
        }
        let mut rng = substream(seed, &format!("truncate-{split}-{topic}"));
        for j in index::sample(&mut rng, idx.len(), cap) {
            keep[idx[j]] = true;
        }
    }
    examples.iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| e.clone()).collect()
}

pub fn truncate(splits: &StanceSplits, scenario: Scenario, train_cap: usize, eval_cap: usize, seed: u64) -> StanceSplits {
    match scenario {
        Scenario::AllData => splits.clone(),
        Scenario::TruncTrain => StanceSplits {
            train: cap_topics(&splits.train, train_cap, seed, "train"),
            ..splits.clone()
        },
        Scenario::TruncAll => StanceSplits {
            train: cap_topics(&splits.train, train_cap, seed, "train"),
            dev: cap_topics(&splits.dev, eval_cap, seed, "dev"),
            test: cap_topics(&splits.test, eval_cap, seed, "test"),
        },
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TopicStats {
    pub topic: String,
    pub examples: usize,
    pub con: usize,
    pub pro: usize,
    pub neutral: usize,
}

/// Per-topic counts, largest topic first, followed by an `Overall` row.
pub fn dataset_stats(examples: &[StanceExample]) -> Vec<TopicStats> {
    let mut map: BTreeMap<&str, TopicStats> = BTreeMap::new();
    let mut overall = TopicStats { topic: "Overall".into(), ..Default::default() };
    for ex in examples {
        let s = map.entry(ex.topic.as_str()).or_insert_with(|| TopicStats {
            topic: ex.topic.clone(),
            ..Default::default()
        });
        for t in [&mut *s, &mut overall] {
            t.examples += 1;
            match ex.label {
                StanceLabel::Con => t.con += 1,
                StanceLabel::Pro => t.pro += 1,
                StanceLabel::Neutral => t.neutral += 1,
            }
        }
    }
    let mut rows: Vec<TopicStats> = map.into_values().collect();
    rows.sort_by(|a, b| b.examples.cmp(&a.examples).then_with(|| a.topic.cmp(&b.topic)));
    rows.push(overall);
    rows
}

pub fn stats_csv(rows: &[TopicStats]) -> String {
    let mut s = String::from("topic,n_ex,n_con,n_pro,n_neutral\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{}\n", csv_field(&r.topic), r.examples, r.con, r.pro, r.neutral));
    }
    s
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(topic: &str, label: StanceLabel, author: &str, text: &str) -> StanceExample {
        StanceExample {
            topic: topic.into(),
            topic_tokens: topic_tokens(topic),
            tokens: tokenize(text).into_iter().map(|w| Token { word: w, tag: "NN".into() }).collect(),
            label,
            author: author.into(),
        }
    }

    #[test]
    fn preprocessing() {
        let rec = StanceRecord {
            topic: "Gun Control".into(),
            text: "The guns, obviously, KILL!".into(),
            pos_tags: Some(vec!["DT".into(), "NNS".into(), "RB".into(), "VB".into()]),
            label: StanceLabel::Con,
            author: "u1".into(),
        };
        let e = preprocess(&rec, &FallbackTagger::default()).unwrap().unwrap();
        assert_eq!(e.topic_tokens, ["gun", "control"]);
        let got: Vec<(&str, &str)> = e.tokens.iter().map(|t| (t.word.as_str(), t.tag.as_str())).collect();
        assert_eq!(got, [("guns", "NNS"), ("obviously", "RB"), ("kill", "VB")]);
        assert_eq!(e.tokens[0].pos(), Some(Pos::Noun));
        assert_eq!(e.tokens[1].pos(), None);

        let bad = StanceRecord { pos_tags: Some(vec!["DT".into()]), ..rec.clone() };
        assert!(preprocess(&bad, &FallbackTagger::default()).is_err());
        let empty = StanceRecord { text: "the of , !".into(), pos_tags: None, ..rec };
        assert!(preprocess(&empty, &FallbackTagger::default()).unwrap().is_none());
    }

    #[test]
    fn fallback_tagger() {
        let lex: Lexicon = [crate::lexicon::LexiconEntry::new("run", Pos::Verb)].into_iter().collect();
        let t = FallbackTagger::from_lexicon(&lex);
        assert_eq!(t.tag("run"), "VB");
        assert_eq!(t.tag("quickly"), "RB");
        assert_eq!(t.tag("dangerous"), "JJ");
        assert_eq!(t.tag("house"), "NN");
        assert_eq!(t.tag("2016"), "CD");
    }

    #[test]
    fn jsonl_reading_reports_lines() {
        let text = "{\"topic\":\"abortion\",\"text\":\"life matters\",\"label\":\"con\",\"author\":\"a\"}\n{bad\n";
        let err = read_stance(text.as_bytes(), Path::new("s.jsonl"), &FallbackTagger::default()).unwrap_err();
        assert!(err.to_string().starts_with("s.jsonl:2:"), "{err}");
        let (exs, rep) = read_stance(&text.as_bytes()[..text.find('\n').unwrap()], Path::new("s"), &FallbackTagger::default()).unwrap();
        assert_eq!(exs.len(), 1);
        assert_eq!(rep.tagged_by_fallback, 1);
    }

    #[test]
    fn ten_authors_split_six_two_two() {
        let exs: Vec<_> = (0..100)
            .map(|i| ex("t", StanceLabel::Pro, &format!("a{}", i / 10), "word"))
            .collect();
        let s = build_splits(&exs, 3).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (60, 20, 20));
        assert_eq!(build_splits(&exs, 3).unwrap(), s);
    }

    #[test]
    fn authors_never_cross_splits() {
        let exs: Vec<_> = (0..300)
            .map(|i| ex(["a", "b"][i % 2], StanceLabel::Con, &format!("u{}", (i * 7) % 37), "x y"))
            .collect();
        let s = build_splits(&exs, 1).unwrap();
        let authors = |v: &Vec<StanceExample>| v.iter().map(|e| e.author.clone()).collect::<std::collections::BTreeSet<_>>();
        assert!(authors(&s.train).is_disjoint(&authors(&s.dev)));
        assert!(authors(&s.train).is_disjoint(&authors(&s.test)));
        assert!(authors(&s.dev).is_disjoint(&authors(&s.test)));
        assert_eq!(s.train.len() + s.dev.len() + s.test.len(), 300);
    }

    #[test]
    fn neutrals_change_topic() {
        let exs: Vec<_> = (0..40)
            .map(|i| ex(["x", "y", "z"][i % 3], [StanceLabel::Pro, StanceLabel::Con][i % 2], "a", &format!("w{i}")))
            .collect();
        let n = generate_neutrals(&exs, 500, 9).unwrap();
        assert_eq!(n.len(), 500);
        for e in &n {
            assert_eq!(e.label, StanceLabel::Neutral);
            let src = exs.iter().find(|s| s.tokens == e.tokens).unwrap();
            assert_ne!(src.topic, e.topic);
            assert_eq!(e.topic_tokens, topic_tokens(&e.topic));
        }
        assert_eq!(generate_neutrals(&exs, 500, 9).unwrap(), n);
        let one: Vec<_> = exs.iter().filter(|e| e.topic == "x").cloned().collect();
        assert!(generate_neutrals(&one, 1, 0).is_err());
    }

    #[test]
    fn two_topic_neutral_balance() {
        // with two equal topics every neutral lands on the other topic, so
        // the count per topic follows the sources: Binomial(1000, 1/2),
        // sd = sqrt(250) ~ 15.8, 3 sd ~ 47.4
        let exs: Vec<_> = (0..200).map(|i| ex(["x", "y"][i % 2], StanceLabel::Pro, "a", "w")).collect();
        let n = generate_neutrals(&exs, 1000, 4).unwrap();
        let x = n.iter().filter(|e| e.topic == "x").count() as f64;
        assert!((x - 500.0).abs() <= 3.0 * 250f64.sqrt(), "{x}");
    }

    #[test]
    fn truncation_caps() {
        let mut exs: Vec<_> = (0..2500).map(|i| ex("big", StanceLabel::Pro, &format!("a{i}"), "w")).collect();
        exs.extend((0..100).map(|i| ex("small", StanceLabel::Con, &format!("b{i}"), "w")));
        let splits = StanceSplits {
            train: exs.clone(),
            dev: exs[..700].to_vec(),
            test: exs[2400..].to_vec(),
        };
        let t = truncate(&splits, Scenario::TruncTrain, 2000, 600, 5);
        let count = |v: &[StanceExample], topic: &str| v.iter().filter(|e| e.topic == topic).count();
        assert_eq!(count(&t.train, "big"), 2000);
        assert_eq!(count(&t.train, "small"), 100);
        assert_eq!(t.dev.len(), 700);
        let a = truncate(&splits, Scenario::TruncAll, 2000, 600, 5);
        assert_eq!(a.dev.len(), 600);
        assert_eq!(a.test, splits.test);
        assert_eq!(truncate(&a, Scenario::TruncAll, 2000, 600, 5), a);
        assert_eq!(truncate(&splits, Scenario::AllData, 1, 1, 5), splits);
        assert_eq!("trunc-all".parse::<Scenario>().unwrap(), Scenario::TruncAll);
    }

    #[test]
    fn stats_rows() {
        let exs = vec![
            ex("a", StanceLabel::Pro, "u", "w"),
            ex("a", StanceLabel::Con, "u", "w"),
            ex("b", StanceLabel::Neutral, "u", "w"),
        ];
        let rows = dataset_stats(&exs);
        assert_eq!(rows[0].topic, "a");
        assert_eq!((rows[0].examples, rows[0].con, rows[0].pro), (2, 1, 1));
        assert_eq!(rows[2].topic, "Overall");
        assert_eq!(rows[2].neutral, 1);
        assert!(stats_csv(&rows).starts_with("topic,n_ex,n_con,n_pro,n_neutral\na,2,1,1,0\n"));
    }
}
