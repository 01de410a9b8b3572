//! Distant-labeling rule table.
//!
//! Maps General Inquirer categories to the three GI-backed aspects and
//! resolves the polarity of a sense from its valence categories. The
//! default table can be overridden from a TOML file:
//!
//! ```toml
//! theta_factuality = 0.25
//! theta_sentiment = 0.25
//!
//! [categories]
//! social_value = ["PowAuth", "Fail"]
//! politeness = ["RspGain"]
//! impact = ["Virtue"]
//!
//! [[polarity_tiers]]
//! positive = ["Positiv"]
//! negative = ["Negativ"]
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aspect::{Aspect, Polarity};
use crate::error::{Error, Result};

const SOCIAL_VALUE: &[&str] = &[
    "PowGain", "PowLoss", "PowEnds", "PowCon", "PowCoop", "PowAuPt", "PowPt", "PowAuth", "PowOth",
    "RcEthic", "RcRelig", "RcGain", "RcEnds", "RcLoss", "Virtue", "Vice", "WltPt", "WltTran",
    "WltOth", "Food", "Object", "Doctrin", "Academ", "Work", "NatrObj", "Vehicle", "Econ@", "Goal",
    "EnlPt", "EnlOth", "EnlLoss", "SklPt", "SklAsth", "SklOth", "Exprsv", "Legal", "COLL", "Means",
    "MeansLw", "Fail", "Solve", "EndsLw", "Try", "WlbPhys", "WlbGain", "WlbPt", "WlbLoss",
    "WlbPsyc", "Quality", "SocRel",
];

const POLITENESS: &[&str] = &[
    "RspGain", "RspLoss", "RspOth", "AffGain", "AffLoss", "AffOth", "WlbPt", "SklPt", "EnlPt",
    "Relig", "WltPt", "Polit@", "HU", "Milit", "Legal", "Academ", "Doctrin",
];

const IMPACT: &[&str] = &[
    "PosAff", "Pleasur", "Pain", "NegAff", "Anomie", "NotLw", "Vice", "Virtue", "RcGain", "RcLoss",
    "RspLoss", "RcEthic", "RspOth", "WlbPsyc", "RcEnds", "EnlOth", "WlbGain", "RspGain", "EnlGain",
    "EnlEnds", "EnlPt", "WlbLoss", "WlbPt", "EnlLoss", "SklOth", "WlbPhys", "Try", "Goal", "Work",
];

/// One precedence level of polarity evidence. A sense is resolved by the
/// first tier in which it carries any category; opposing evidence within
/// that tier resolves to neutral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarityTier {
    #[serde(default)]
    pub positive: BTreeSet<String>,
    #[serde(default)]
    pub negative: BTreeSet<String>,
}

impl PolarityTier {
    fn new(positive: &[&str], negative: &[&str]) -> Self {
        PolarityTier {
            positive: positive.iter().map(|s| s.to_string()).collect(),
            negative: negative.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleTable {
    /// GI categories per GI-backed aspect.
    pub categories: BTreeMap<Aspect, BTreeSet<String>>,
    pub polarity_tiers: Vec<PolarityTier>,
    pub theta_factuality: f64,
    pub theta_sentiment: f64,
}

/// Result of resolving a sense's valence categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub polarity: Polarity,
    pub conflict: bool,
}

impl Default for RuleTable {
    fn default() -> Self {
        let set = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        let mut categories = BTreeMap::new();
        categories.insert(Aspect::SocialValue, set(SOCIAL_VALUE));
        categories.insert(Aspect::Politeness, set(POLITENESS));
        categories.insert(Aspect::Impact, set(IMPACT));
        RuleTable {
            categories,
            polarity_tiers: vec![
                PolarityTier::new(&["Positiv"], &["Negativ"]),
                PolarityTier::new(&[], &["Hostile", "Submit"]),
                PolarityTier::new(&["Strong", "Power", "Active"], &["Weak"]),
            ],
            theta_factuality: 0.25,
            theta_sentiment: 0.25,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleFile {
    theta_factuality: Option<f64>,
    theta_sentiment: Option<f64>,
    categories: Option<BTreeMap<String, Vec<String>>>,
    polarity_tiers: Option<Vec<PolarityTier>>,
}

impl RuleTable {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: RuleFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("rule table: {e}")))?;
        let mut table = RuleTable::default();
        if let Some(t) = file.theta_factuality {
            table.theta_factuality = t;
        }
        if let Some(t) = file.theta_sentiment {
            table.theta_sentiment = t;
        }
        if let Some(cats) = file.categories {
            table.categories.clear();
            for (name, list) in cats {
                let aspect: Aspect = name.parse().map_err(|_| {
                    Error::Config(format!("rule table: unknown aspect `{name}`"))
                })?;
                table.categories.insert(aspect, list.into_iter().collect());
            }
        }
        if let Some(tiers) = file.polarity_tiers {
            table.polarity_tiers = tiers;
        }
        table.validate()?;
        Ok(table)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, theta) in [
            ("theta_factuality", self.theta_factuality),
            ("theta_sentiment", self.theta_sentiment),
        ] {
            if !(theta > 0.0 && theta < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {theta}")));
            }
        }
        for aspect in self.categories.keys() {
            if !matches!(aspect, Aspect::SocialValue | Aspect::Politeness | Aspect::Impact) {
                return Err(Error::Config(format!(
                    "aspect {aspect} is not derived from General Inquirer categories"
                )));
            }
        }
        let polarity = self.polarity_categories();
        for cats in self.categories.values() {
            if let Some(c) = cats.iter().find(|c| polarity.contains(c.as_str())) {
                return Err(Error::Config(format!(
                    "category `{c}` is used both as an aspect category and as polarity evidence"
                )));
            }
        }
        Ok(())
    }

    pub fn polarity_categories(&self) -> BTreeSet<&str> {
        self.polarity_tiers
            .iter()
            .flat_map(|t| t.positive.iter().chain(t.negative.iter()))
            .map(String::as_str)
            .collect()
    }

    /// True if the category is used anywhere in the table.
    pub fn is_known(&self, category: &str) -> bool {
        self.categories.values().any(|s| s.contains(category))
            || self.polarity_categories().contains(category)
    }

    pub fn aspects_for<'a>(&'a self, category: &'a str) -> impl Iterator<Item = Aspect> + 'a {
        self.categories
            .iter()
            .filter(move |(_, cats)| cats.contains(category))
            .map(|(a, _)| *a)
    }

    pub fn resolve_polarity<S: AsRef<str>>(&self, categories: &[S]) -> Resolution {
        for tier in &self.polarity_tiers {
            let pos = categories.iter().any(|c| tier.positive.contains(c.as_ref()));
            let neg = categories.iter().any(|c| tier.negative.contains(c.as_ref()));
            match (pos, neg) {
                (true, true) => {
                    return Resolution {
                        polarity: Polarity::Neutral,
                        conflict: true,
                    }
                }
                (true, false) => {
                    return Resolution {
                        polarity: Polarity::Positive,
                        conflict: false,
                    }
                }
                (false, true) => {
                    return Resolution {
                        polarity: Polarity::Negative,
                        conflict: false,
                    }
                }
                (false, false) => {}
            }
        }
        Resolution {
            polarity: Polarity::Neutral,
            conflict: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_is_valid() {
        let t = RuleTable::default();
        t.validate().unwrap();
        assert_eq!(t.categories[&Aspect::SocialValue].len(), 50);
        assert_eq!(t.categories[&Aspect::Politeness].len(), 17);
        assert_eq!(t.categories[&Aspect::Impact].len(), 29);
    }

    #[test]
    fn shared_categories_map_to_each_listed_aspect() {
        let t = RuleTable::default();
        let aspects: Vec<_> = t.aspects_for("WlbPt").collect();
        assert_eq!(aspects, vec![Aspect::SocialValue, Aspect::Politeness, Aspect::Impact]);
        assert_eq!(t.aspects_for("AffLoss").collect::<Vec<_>>(), vec![Aspect::Politeness]);
    }

    #[test]
    fn tier_precedence() {
        let t = RuleTable::default();
        let r = |cats: &[&str]| t.resolve_polarity(cats);
        assert_eq!(r(&["Positiv", "Weak"]).polarity, Polarity::Positive);
        assert_eq!(r(&["Hostile", "Strong"]).polarity, Polarity::Negative);
        assert_eq!(r(&["Strong"]).polarity, Polarity::Positive);
        assert_eq!(r(&["Weak"]).polarity, Polarity::Negative);
        let conflict = r(&["Positiv", "Negativ"]);
        assert_eq!(conflict.polarity, Polarity::Neutral);
        assert!(conflict.conflict);
        assert_eq!(r(&["Strong", "Weak"]).polarity, Polarity::Neutral);
        assert!(!r(&[]).conflict);
    }

    #[test]
    fn toml_override() {
        let t = RuleTable::from_toml_str(
            r#"
            theta_factuality = 0.4
            [categories]
            social_value = ["Fail"]
            "#,
        )
        .unwrap();
        assert_eq!(t.theta_factuality, 0.4);
        assert_eq!(t.theta_sentiment, 0.25);
        assert_eq!(t.categories.len(), 1);
        assert!(RuleTable::from_toml_str("theta_sentiment = 1.5").is_err());
        assert!(RuleTable::from_toml_str("[categories]\nsentiment = [\"X\"]").is_err());
        assert!(RuleTable::from_toml_str("bogus = 1").is_err());
    }
}
