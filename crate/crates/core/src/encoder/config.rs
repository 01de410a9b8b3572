use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aspect::Aspect;
use crate::error::{Error, Result};

/// Joint training of all aspects with one encoder, or one encoder per aspect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "J")]
    Joint,
    #[serde(rename = "S")]
    Separate,
}

/// Definition encoder with or without attention over related words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "CE")]
    Ce,
    #[serde(rename = "CE+R")]
    CeR,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "J" | "JOINT" => Ok(Mode::Joint),
            "S" | "SEPARATE" => Ok(Mode::Separate),
            _ => Err(Error::Config(format!("unknown mode `{s}` (expected J or S)"))),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CE" => Ok(Variant::Ce),
            "CE+R" | "CER" | "CE-R" => Ok(Variant::CeR),
            _ => Err(Error::Config(format!("unknown variant `{s}` (expected CE or CE+R)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Joint => "J",
            Mode::Separate => "S",
        })
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Ce => "CE",
            Variant::CeR => "CE+R",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub hidden: usize,
    pub max_tokens: usize,
    pub max_related: usize,
    pub dropout: f64,
    pub emotion_threshold: f64,
    /// Overrides of the per-aspect loss weights.
    pub loss_weights: BTreeMap<Aspect, f64>,
    pub epochs: usize,
    pub patience: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub mode: Mode,
    pub variant: Variant,
    pub seed: u64,
    /// Training aborts if no epoch among the first `stall_epochs` improves
    /// on the first epoch's loss.
    pub stall_epochs: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            hidden: 150,
            max_tokens: 42,
            max_related: 20,
            dropout: 0.5,
            emotion_threshold: 0.5,
            loss_weights: BTreeMap::new(),
            epochs: 80,
            patience: 10,
            lr: 0.001,
            batch_size: 64,
            mode: Mode::Joint,
            variant: Variant::CeR,
            seed: 0,
            stall_epochs: 5,
        }
    }
}

impl ModelConfig {
    pub fn loss_weight(&self, a: Aspect) -> f64 {
        self.loss_weights.get(&a).copied().unwrap_or_else(|| a.default_loss_weight())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.hidden == 0 || self.max_tokens == 0 || self.batch_size == 0 {
            return bad("hidden, max_tokens and batch_size must be positive".into());
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout {} outside [0, 1)", self.dropout));
        }
        if !(self.emotion_threshold > 0.0 && self.emotion_threshold < 1.0) {
            return bad(format!("emotion threshold {} outside (0, 1)", self.emotion_threshold));
        }
        if let Some((a, w)) = self.loss_weights.iter().find(|(_, w)| !(**w > 0.0 && w.is_finite())) {
            return bad(format!("loss weight for {a} must be positive, got {w}"));
        }
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return bad(format!("learning rate {} must be non-negative", self.lr));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_validation() {
        let c = ModelConfig::default();
        c.validate().unwrap();
        assert_eq!(c.loss_weight(Aspect::Emotion), 3.0);
        assert_eq!(c.loss_weight(Aspect::Politeness), 0.5);
        let mut bad = c.clone();
        bad.loss_weights.insert(Aspect::Impact, 0.0);
        assert!(bad.validate().is_err());
        let mut bad = c;
        bad.emotion_threshold = 1.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn parses_from_toml() {
        let c: ModelConfig = toml::from_str("hidden = 8\nmode = \"S\"\nvariant = \"CE\"\n[loss_weights]\nimpact = 2.0\n").unwrap();
        assert_eq!((c.hidden, c.mode, c.variant), (8, Mode::Separate, Variant::Ce));
        assert_eq!(c.loss_weight(Aspect::Impact), 2.0);
        assert!(toml::from_str::<ModelConfig>("hiden = 8").is_err());
    }
}
