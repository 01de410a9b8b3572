//! Run configuration: a TOML file merged with command-line overrides.

use std::path::Path;

use connotation::encoder::config::ModelConfig;
use connotation::eval::purity::PurityConfig;
use connotation::eval::significance::DEFAULT_ROUNDS;
use connotation::stance::StanceConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::run::UsageError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignificanceConfig {
    pub rounds: usize,
}

impl Default for SignificanceConfig {
    fn default() -> Self {
        SignificanceConfig { rounds: DEFAULT_ROUNDS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradCheckConfig {
    pub instances: usize,
    pub step: f64,
    pub tolerance: f64,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        GradCheckConfig { instances: 20, step: 1e-4, tolerance: 1e-3 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seed for every stochastic step; copied into the model sections.
    pub seed: Option<u64>,
    pub model: ModelConfig,
    pub stance: StanceConfig,
    pub purity: PurityConfig,
    pub significance: SignificanceConfig,
    pub grad_check: GradCheckConfig,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

impl RunConfig {
    pub fn parse(text: &str, path: &Path) -> Result<RunConfig, UsageError> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().trim().to_string();
            match e.span() {
                Some(span) => {
                    let (line, col) = line_col(text, span.start);
                    UsageError(format!("{}:{line}:{col}: {msg}", path.display()))
                }
                None => UsageError(format!("{}: {msg}", path.display())),
            }
        })
    }

    pub fn load(path: &Path) -> Result<RunConfig, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        RunConfig::parse(&text, path)
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = Some(seed);
        self.model.seed = seed;
        self.stance.seed = seed;
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        self.model.validate().map_err(|e| UsageError(format!("[model] {e}")))?;
        self.stance.validate().map_err(|e| UsageError(format!("[stance] {e}")))?;
        if self.purity.k == 0 {
            return Err(UsageError("[purity] k must be positive".into()));
        }
        if self.significance.rounds == 0 {
            return Err(UsageError("[significance] rounds must be positive".into()));
        }
        let g = &self.grad_check;
        if g.instances == 0 || !(g.step > 0.0) || !(g.tolerance > 0.0) {
            return Err(UsageError("[grad_check] instances, step and tolerance must be positive".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("serializable config");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
