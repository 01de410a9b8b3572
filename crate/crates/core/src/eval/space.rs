//! Embedding spaces keyed by `(word, pos)` and exact nearest neighbors.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::aspect::Pos;
use crate::embeddings::Embeddings;
use crate::error::{Error, Result};

pub type Key = (String, Pos);

/// Which kind of space the vectors come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SpaceTag {
    #[serde(rename = "C")]
    Connotation,
    #[serde(rename = "P")]
    Pretrained,
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceTag::Connotation => "C",
            SpaceTag::Pretrained => "P",
        })
    }
}

/// Splits an embeddings-file key of the form `word|pos`.
pub fn parse_key(key: &str) -> Result<Key> {
    let (word, pos) = key
        .rsplit_once('|')
        .ok_or_else(|| Error::InvalidInput(format!("expected word|pos key, got `{key}`")))?;
    Ok((word.to_string(), Pos::from_str(pos)?))
}

pub fn format_key(word: &str, pos: Pos) -> String {
    format!("{word}|{pos}")
}

#[derive(Debug, Clone)]
pub struct EmbeddingSpace {
    pub tag: SpaceTag,
    dim: usize,
    keys: Vec<Key>,
    data: Vec<f64>,
    index: HashMap<Key, usize>,
}

/// One neighbor and its Euclidean distance to the query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbor {
    pub word: String,
    pub pos: Pos,
    pub distance: f64,
}

impl EmbeddingSpace {
    pub fn new(tag: SpaceTag, dim: usize) -> Self {
        EmbeddingSpace {
            tag,
            dim,
            keys: Vec::new(),
            data: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn insert(&mut self, word: &str, pos: Pos, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::Shape(format!(
                "vector for {word}|{pos} has dimension {}, space has {}",
                v.len(),
                self.dim
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite vector for {word}|{pos}")));
        }
        let key = (word.to_string(), pos);
        if self.index.contains_key(&key) {
            return Err(Error::InvalidInput(format!("duplicate key {word}|{pos}")));
        }
        self.index.insert(key.clone(), self.keys.len());
        self.keys.push(key);
        self.data.extend_from_slice(v);
        Ok(())
    }

    /// A connotation space from exported `word|pos` embeddings.
    pub fn from_keyed(emb: &Embeddings, tag: SpaceTag) -> Result<Self> {
        let mut space = EmbeddingSpace::new(tag, emb.dim());
        for (key, v) in emb.iter() {
            let (word, pos) = parse_key(key)?;
            space.insert(&word, pos, &v)?;
        }
        Ok(space)
    }

    /// A pretrained space over `keys`, looking each word up by surface form.
    /// Keys whose word has no vector are skipped.
    pub fn from_words<'a>(emb: &Embeddings, keys: impl IntoIterator<Item = &'a Key>) -> Result<Self> {
        let mut space = EmbeddingSpace::new(SpaceTag::Pretrained, emb.dim());
        for (word, pos) in keys {
            if let Some(v) = emb.get(word) {
                space.insert(word, *pos, &v)?;
            }
        }
        Ok(space)
    }

    /// Restricts the space to keys accepted by `keep`, preserving order.
    pub fn filter(&self, mut keep: impl FnMut(&Key) -> bool) -> Self {
        let mut out = EmbeddingSpace::new(self.tag, self.dim);
        for (i, key) in self.keys.iter().enumerate() {
            if keep(key) {
                out.insert(&key.0, key.1, self.vector(i)).expect("already validated");
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[Key] {
        &self.keys
    }

    pub fn contains(&self, word: &str, pos: Pos) -> bool {
        self.index.contains_key(&(word.to_string(), pos))
    }

    fn vector(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, word: &str, pos: Pos) -> Option<&[f64]> {
        self.index.get(&(word.to_string(), pos)).map(|&i| self.vector(i))
    }

    /// The `k` nearest keys to `(word, pos)` by Euclidean distance, excluding
    /// the query itself. Ties are broken by word, then part of speech.
    pub fn knn(&self, word: &str, pos: Pos, k: usize) -> Result<Vec<Neighbor>> {
        Ok(self
            .knn_indices(self.position(word, pos)?, k)?
            .into_iter()
            .map(|(i, d2)| Neighbor {
                word: self.keys[i].0.clone(),
                pos: self.keys[i].1,
                distance: d2.sqrt(),
            })
            .collect())
    }

    pub(crate) fn position(&self, word: &str, pos: Pos) -> Result<usize> {
        self.index
            .get(&(word.to_string(), pos))
            .copied()
            .ok_or_else(|| Error::Missing(format!("{word}|{pos} not in the {} space", self.tag)))
    }

    /// Indices and squared distances of the `k` nearest neighbors of row `q`.
    pub(crate) fn knn_indices(&self, q: usize, k: usize) -> Result<Vec<(usize, f64)>> {
        if k >= self.len() {
            return Err(Error::InvalidInput(format!(
                "k = {k} needs more than {k} words, the space has {}",
                self.len()
            )));
        }
        let query = self.vector(q);
        let mut cands: Vec<(usize, f64)> = (0..self.len())
            .filter(|&i| i != q)
            .map(|i| {
                let d2 = self
                    .vector(i)
                    .iter()
                    .zip(query)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
                (i, d2)
            })
            .collect();
        let cmp = |a: &(usize, f64), b: &(usize, f64)| {
            a.1.partial_cmp(&b.1)
                .unwrap_or(Ordering::Equal)
                .then_with(|| self.keys[a.0].cmp(&self.keys[b.0]))
        };
        if k == 0 {
            return Ok(Vec::new());
        }
        if k < cands.len() {
            cands.select_nth_unstable_by(k - 1, cmp);
            cands.truncate(k);
        }
        cands.sort_by(cmp);
        Ok(cands)
    }
}
