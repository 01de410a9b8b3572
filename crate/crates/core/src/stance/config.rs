use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::data::Scenario;
use crate::error::{Error, Result};

/// Embeddings the text attention reads: none (plain BiC), pretrained word
/// vectors, connotation embeddings or fixed random vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AttentionKind {
    #[default]
    #[serde(rename = "none")]
    None,
    #[serde(rename = "w")]
    Word,
    #[serde(rename = "c")]
    Connotation,
    #[serde(rename = "r")]
    Random,
}

impl AttentionKind {
    pub fn model_name(self) -> &'static str {
        match self {
            AttentionKind::None => "BiC",
            AttentionKind::Word => "BiC+W",
            AttentionKind::Connotation => "BiC+C",
            AttentionKind::Random => "BiC+R",
        }
    }
}

impl FromStr for AttentionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(AttentionKind::None),
            "w" => Ok(AttentionKind::Word),
            "c" => Ok(AttentionKind::Connotation),
            "r" => Ok(AttentionKind::Random),
            _ => Err(Error::InvalidInput(format!("unknown attention source `{s}` (none, w, c, r)"))),
        }
    }
}

impl fmt::Display for AttentionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttentionKind::None => "none",
            AttentionKind::Word => "w",
            AttentionKind::Connotation => "c",
            AttentionKind::Random => "r",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StanceConfig {
    pub hidden: usize,
    pub dropout: f64,
    pub epochs: usize,
    /// Epochs without a development improvement before stopping.
    pub patience: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub word_dim: usize,
    pub train_cap: usize,
    pub eval_cap: usize,
    pub scenario: Scenario,
    pub attention: AttentionKind,
    /// Dimension of the random attention embeddings.
    pub random_dim: usize,
    /// Generated neutrals per pro/con example in each split.
    pub neutral_ratio: f64,
    /// Keeps only the first tokens of long texts when set.
    pub max_text_tokens: Option<usize>,
    pub seed: u64,
}

impl Default for StanceConfig {
    fn default() -> Self {
        StanceConfig {
            hidden: 60,
            dropout: 0.5,
            epochs: 70,
            patience: 10,
            lr: 0.001,
            batch_size: 64,
            word_dim: 100,
            train_cap: 2000,
            eval_cap: 600,
            scenario: Scenario::AllData,
            attention: AttentionKind::None,
            random_dim: 100,
            neutral_ratio: 0.5,
            max_text_tokens: None,
            seed: 0,
        }
    }
}

impl StanceConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.hidden == 0 || self.word_dim == 0 || self.random_dim == 0 {
            return bad("hidden, word_dim and random_dim must be positive");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout must be in [0, 1)");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if self.train_cap == 0 || self.eval_cap == 0 {
            return bad("truncation caps must be positive");
        }
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return bad("lr must be a non-negative number");
        }
        if !(self.neutral_ratio >= 0.0 && self.neutral_ratio.is_finite()) {
            return bad("neutral_ratio must be non-negative");
        }
        if self.max_text_tokens == Some(0) {
            return bad("max_text_tokens must be positive");
        }
        Ok(())
    }
}
