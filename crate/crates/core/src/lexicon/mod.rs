//! Connotation lexicon: entries, distant-labeling compiler and statistics.

mod agreement;
mod compile;
mod rules;
mod sources;
mod stats;
mod verbs;

pub use agreement::{agreement_metrics, majority_label, AgreementReport};
pub use compile::{
    aggregate_senses, compile_lexicon, map_hgi_sense, normalize_scale, threshold_label,
    CompileReport, SenseLabels,
};
pub use rules::{PolarityTier, Resolution, RuleTable};
pub use sources::{
    parse_cwn, parse_dal, parse_hgi, parse_nrc, CwnRecord, DalRecord, HgiRecord, NrcRecord,
    Sources,
};
pub use stats::{class_distribution, ClassDistribution, ClassShares};
pub use verbs::{parse_verb_frames, VerbFrame};

pub(crate) use sources::{normalize_word, tsv_records};

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aspect::{Aspect, Label, Pos};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Hgi,
    Dal,
    Cwn,
    Nrc,
    VerbFrames,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Hgi => "HGI",
            Source::Dal => "DAL",
            Source::Cwn => "CWN",
            Source::Nrc => "NRC",
            Source::VerbFrames => "verb-frames",
        }
    }
}

/// Where an aspect label came from; `conflict` marks labels forced to
/// neutral by opposing polarity evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub source: Source,
    pub conflict: bool,
}

impl Provenance {
    pub fn new(source: Source) -> Self {
        Provenance {
            source,
            conflict: false,
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.source.as_str())?;
        if self.conflict {
            f.write_str(":conflict")?;
        }
        Ok(())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, conflict) = match s.strip_suffix(":conflict") {
            Some(n) => (n, true),
            None => (s, false),
        };
        let source = match name {
            "HGI" => Source::Hgi,
            "DAL" => Source::Dal,
            "CWN" => Source::Cwn,
            "NRC" => Source::Nrc,
            "verb-frames" => Source::VerbFrames,
            _ => return Err(Error::InvalidInput(format!("unknown provenance `{s}`"))),
        };
        Ok(Provenance { source, conflict })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub word: String,
    pub pos: Pos,
    pub labels: BTreeMap<Aspect, Label>,
    pub provenance: BTreeMap<Aspect, Provenance>,
    pub fully_labeled: bool,
}

impl LexiconEntry {
    pub fn new(word: impl Into<String>, pos: Pos) -> Self {
        LexiconEntry {
            word: word.into(),
            pos,
            labels: BTreeMap::new(),
            provenance: BTreeMap::new(),
            fully_labeled: false,
        }
    }

    pub fn with_label(mut self, aspect: Aspect, label: Label, source: Source) -> Self {
        self.set_label(aspect, label, Provenance::new(source));
        self
    }

    pub fn set_label(&mut self, aspect: Aspect, label: Label, provenance: Provenance) {
        self.labels.insert(aspect, label);
        self.provenance.insert(aspect, provenance);
        self.refresh_fully_labeled();
    }

    pub fn label(&self, aspect: Aspect) -> Option<&Label> {
        self.labels.get(&aspect)
    }

    pub fn refresh_fully_labeled(&mut self) {
        self.fully_labeled = Aspect::for_pos(self.pos).iter().all(|a| self.labels.contains_key(a));
    }

    pub fn key(&self) -> (String, Pos) {
        (self.word.clone(), self.pos)
    }
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    word: String,
    pos: Pos,
    labels: BTreeMap<String, serde_json::Value>,
    fully_labeled: bool,
    provenance: BTreeMap<String, String>,
}

impl From<&LexiconEntry> for EntryRecord {
    fn from(e: &LexiconEntry) -> Self {
        EntryRecord {
            word: e.word.clone(),
            pos: e.pos,
            labels: e.labels.iter().map(|(a, l)| (a.to_string(), l.to_json())).collect(),
            fully_labeled: e.fully_labeled,
            provenance: e.provenance.iter().map(|(a, p)| (a.to_string(), p.to_string())).collect(),
        }
    }
}

impl TryFrom<EntryRecord> for LexiconEntry {
    type Error = Error;

    fn try_from(r: EntryRecord) -> Result<Self> {
        let mut entry = LexiconEntry::new(r.word, r.pos);
        for (name, value) in &r.labels {
            let aspect: Aspect = name.parse()?;
            if !aspect.applies_to(entry.pos) {
                return Err(Error::InvalidInput(format!(
                    "aspect {aspect} does not apply to {}",
                    entry.pos
                )));
            }
            entry.labels.insert(aspect, Label::from_json(aspect, value)?);
        }
        for (name, prov) in &r.provenance {
            entry.provenance.insert(name.parse()?, prov.parse()?);
        }
        entry.refresh_fully_labeled();
        if entry.fully_labeled != r.fully_labeled {
            return Err(Error::InvalidInput(format!(
                "fully_labeled flag of `{}` disagrees with its labels",
                entry.word
            )));
        }
        Ok(entry)
    }
}

/// Entries keyed by `(word, pos)`, iterated in key order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<(String, Pos), LexiconEntry>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces the entry for its `(word, pos)` key.
    pub fn insert(&mut self, entry: LexiconEntry) {
        self.entries.insert(entry.key(), entry);
    }

    pub fn get(&self, word: &str, pos: Pos) -> Option<&LexiconEntry> {
        self.entries.get(&(word.to_string(), pos))
    }

    pub fn get_mut(&mut self, word: &str, pos: Pos) -> Option<&mut LexiconEntry> {
        self.entries.get_mut(&(word.to_string(), pos))
    }

    pub fn contains(&self, word: &str, pos: Pos) -> bool {
        self.get(word, pos).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    pub fn label(&self, word: &str, pos: Pos, aspect: Aspect) -> Option<Label> {
        self.get(word, pos).and_then(|e| e.label(aspect).copied())
    }

    pub fn fully_labeled(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.iter().filter(|e| e.fully_labeled)
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for e in self.iter() {
            serde_json::to_writer(&mut w, &EntryRecord::from(e))?;
            w.write_all(b"\n").map_err(|e| Error::io("<lexicon output>", e))?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R, path: &Path) -> Result<Lexicon> {
        let mut lex = Lexicon::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: EntryRecord = serde_json::from_str(&line)
                .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
            let entry =
                LexiconEntry::try_from(rec).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
            if lex.contains(&entry.word, entry.pos) {
                return Err(Error::parse(
                    path,
                    i + 1,
                    format!("duplicate entry ({}, {})", entry.word, entry.pos),
                ));
            }
            lex.insert(entry);
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Lexicon> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_jsonl(std::io::BufReader::new(f), path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(f);
        self.write_jsonl(&mut w)?;
        w.flush().map_err(|e| Error::io(path, e))
    }
}

impl FromIterator<LexiconEntry> for Lexicon {
    fn from_iter<I: IntoIterator<Item = LexiconEntry>>(iter: I) -> Self {
        let mut lex = Lexicon::new();
        for e in iter {
            lex.insert(e);
        }
        lex
    }
}

impl Extend<LexiconEntry> for Lexicon {
    fn extend<I: IntoIterator<Item = LexiconEntry>>(&mut self, iter: I) {
        for e in iter {
            self.insert(e);
        }
    }
}
