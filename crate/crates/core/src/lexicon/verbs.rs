//! Verb connotation frames.
//!
//! `verb_frames.tsv` rows are `verb  split  aspect=value,...` where `split`
//! is `train`, `dev`, `test` or `-` (no published split). Values are
//! `-1`/`0`/`1` for the nine polar aspects (real-valued scores are
//! thresholded at ±0.25), and a class index `0..4` or one of
//! `agent`/`theme`/`equal`/`neutral` for power and agency.

use std::collections::BTreeMap;
use std::path::Path;

use super::compile::threshold_label;
use super::sources::{normalize_word, tsv_records};
use super::{LexiconEntry, Source};
use crate::aspect::{Aspect, Label, Pos, FOUR_WAY_NAMES};
use crate::error::{Error, Result};
use crate::split::Split;

#[derive(Debug, Clone, PartialEq)]
pub struct VerbFrame {
    pub word: String,
    pub split: Option<Split>,
    pub labels: BTreeMap<Aspect, Label>,
}

impl VerbFrame {
    pub fn to_entry(&self) -> LexiconEntry {
        let mut e = LexiconEntry::new(self.word.clone(), Pos::Verb);
        for (a, l) in &self.labels {
            e = e.with_label(*a, *l, Source::VerbFrames);
        }
        e
    }
}

fn parse_value(aspect: Aspect, raw: &str) -> Option<Label> {
    let raw = raw.trim();
    if aspect.is_four_way() {
        if let Some(i) = FOUR_WAY_NAMES.iter().position(|n| n.eq_ignore_ascii_case(raw)) {
            return Some(Label::FourWay(i as u8));
        }
        return raw.parse::<u8>().ok().filter(|&v| v < 4).map(Label::FourWay);
    }
    let x: f64 = raw.parse().ok()?;
    if !(-1.0..=1.0).contains(&x) {
        return None;
    }
    Some(Label::Polar(threshold_label(x, 0.25)))
}

pub fn parse_verb_frames(text: &str, path: &Path) -> Result<Vec<VerbFrame>> {
    let mut seen = std::collections::BTreeSet::new();
    tsv_records(text, path, 3)
        .map(|r| {
            let (line, f) = r?;
            let word = normalize_word(f[0]);
            if word.is_empty() {
                return Err(Error::parse(path, line, "empty word"));
            }
            if !seen.insert(word.clone()) {
                return Err(Error::parse(path, line, format!("duplicate verb `{word}`")));
            }
            let split = match f[1].trim() {
                "-" | "" => None,
                s => Some(s.parse().map_err(|e: Error| Error::parse(path, line, e.to_string()))?),
            };
            let mut labels = BTreeMap::new();
            for item in f[2].split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (name, value) = item
                    .split_once('=')
                    .ok_or_else(|| Error::parse(path, line, format!("expected aspect=value, got `{item}`")))?;
                let aspect: Aspect =
                    name.parse().map_err(|e: Error| Error::parse(path, line, e.to_string()))?;
                if !aspect.is_verb_aspect() {
                    return Err(Error::parse(path, line, format!("{aspect} is not a verb aspect")));
                }
                let label = parse_value(aspect, value).ok_or_else(|| {
                    Error::parse(path, line, format!("invalid value `{value}` for {aspect}"))
                })?;
                labels.insert(aspect, label);
            }
            Ok(VerbFrame { word, split, labels })
        })
        .collect()
}
