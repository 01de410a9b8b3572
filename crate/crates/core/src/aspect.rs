//! Connotation aspects, parts of speech and label values.
//!
//! Nouns and adjectives carry six aspects; verbs carry the eleven
//! connotation-frame aspects (nine perspective/effect/value/state aspects
//! plus power and agency). Every non-emotion aspect is a single class label;
//! the emotion aspect is a set of eight binary flags.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Noun,
    Adjective,
    Verb,
}

impl Pos {
    pub const ALL: [Pos; 3] = [Pos::Noun, Pos::Adjective, Pos::Verb];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Adjective => "adjective",
            Pos::Verb => "verb",
        }
    }

    /// Accepts the spellings found in the upstream resources: full names,
    /// single letters, Penn Treebank and Universal tags, and bracketed PPDB
    /// constituents such as `[NN]`.
    pub fn parse_loose(s: &str) -> Option<Pos> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        let lower = t.to_ascii_lowercase();
        match lower.as_str() {
            "noun" | "n" | "nn" | "nns" | "nnp" | "nnps" | "propn" => Some(Pos::Noun),
            "adjective" | "adj" | "a" | "j" | "s" | "jj" | "jjr" | "jjs" => Some(Pos::Adjective),
            "verb" | "v" | "vb" | "vbd" | "vbg" | "vbn" | "vbp" | "vbz" => Some(Pos::Verb),
            _ => None,
        }
    }

    pub fn is_noun_or_adjective(self) -> bool {
        matches!(self, Pos::Noun | Pos::Adjective)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pos::parse_loose(s).ok_or_else(|| Error::InvalidInput(format!("unknown part of speech `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "&'static str", try_from = "String")]
pub enum Aspect {
    SocialValue,
    Politeness,
    Impact,
    Factuality,
    Sentiment,
    Emotion,
    /// Writer's perspective on the theme.
    PerspWriterTheme,
    /// Writer's perspective on the agent.
    PerspWriterAgent,
    /// Agent's perspective on the theme.
    PerspAgentTheme,
    EffectTheme,
    EffectAgent,
    ValueTheme,
    ValueAgent,
    StateTheme,
    StateAgent,
    Power,
    Agency,
}

impl Aspect {
    pub const NOUN_ADJ: [Aspect; 6] = [
        Aspect::SocialValue,
        Aspect::Politeness,
        Aspect::Impact,
        Aspect::Factuality,
        Aspect::Sentiment,
        Aspect::Emotion,
    ];

    pub const VERB: [Aspect; 11] = [
        Aspect::PerspWriterTheme,
        Aspect::PerspWriterAgent,
        Aspect::PerspAgentTheme,
        Aspect::EffectTheme,
        Aspect::EffectAgent,
        Aspect::ValueTheme,
        Aspect::ValueAgent,
        Aspect::StateTheme,
        Aspect::StateAgent,
        Aspect::Power,
        Aspect::Agency,
    ];

    pub fn all() -> impl Iterator<Item = Aspect> {
        Self::NOUN_ADJ.into_iter().chain(Self::VERB)
    }

    pub fn for_pos(pos: Pos) -> &'static [Aspect] {
        match pos {
            Pos::Noun | Pos::Adjective => &Self::NOUN_ADJ,
            Pos::Verb => &Self::VERB,
        }
    }

    pub fn applies_to(self, pos: Pos) -> bool {
        Self::for_pos(pos).contains(&self)
    }

    pub fn is_verb_aspect(self) -> bool {
        Self::VERB.contains(&self)
    }

    pub fn is_emotion(self) -> bool {
        self == Aspect::Emotion
    }

    pub fn is_four_way(self) -> bool {
        matches!(self, Aspect::Power | Aspect::Agency)
    }

    /// Output width of the prediction head: classes for single-label
    /// aspects, independent binary outputs for the emotion aspect.
    pub fn num_outputs(self) -> usize {
        if self.is_emotion() {
            EmotionSet::LEN
        } else if self.is_four_way() {
            4
        } else {
            3
        }
    }

    /// Loss weight tuned on the development set for joint training.
    pub fn default_loss_weight(self) -> f64 {
        use Aspect::*;
        match self {
            SocialValue | Impact | ValueTheme | ValueAgent | Power | Agency => 0.3,
            Factuality | Sentiment => 0.167,
            PerspWriterTheme | PerspWriterAgent | PerspAgentTheme | EffectTheme | EffectAgent
            | StateTheme | StateAgent => 1.0,
            Politeness => 0.5,
            Emotion => 3.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        use Aspect::*;
        match self {
            SocialValue => "social_value",
            Politeness => "politeness",
            Impact => "impact",
            Factuality => "factuality",
            Sentiment => "sentiment",
            Emotion => "emotion",
            PerspWriterTheme => "p_wt",
            PerspWriterAgent => "p_wa",
            PerspAgentTheme => "p_at",
            EffectTheme => "e_t",
            EffectAgent => "e_a",
            ValueTheme => "v_t",
            ValueAgent => "v_a",
            StateTheme => "s_t",
            StateAgent => "s_a",
            Power => "power",
            Agency => "agency",
        }
    }
}

impl fmt::Display for Aspect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<Aspect> for &'static str {
    fn from(a: Aspect) -> Self {
        a.as_str()
    }
}

impl TryFrom<String> for Aspect {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for Aspect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['(', ')'], "_");
        let key = key.trim_end_matches('_');
        let aspect = match key {
            "social_value" | "socialvalue" | "socialval" => Aspect::SocialValue,
            "politeness" | "polite" => Aspect::Politeness,
            "emotion" | "emo" => Aspect::Emotion,
            "factuality" | "fact" => Aspect::Factuality,
            "sentiment" | "sent" => Aspect::Sentiment,
            other => match Aspect::all().find(|a| a.as_str() == other) {
                Some(a) => a,
                None => return Err(Error::InvalidInput(format!("unknown aspect `{s}`"))),
            },
        };
        Ok(aspect)
    }
}

/// A three-way connotation value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Negative,
    Neutral,
    Positive,
}

impl Polarity {
    pub fn value(self) -> i8 {
        match self {
            Polarity::Negative => -1,
            Polarity::Neutral => 0,
            Polarity::Positive => 1,
        }
    }

    pub fn from_value(v: i64) -> Option<Polarity> {
        match v {
            -1 => Some(Polarity::Negative),
            0 => Some(Polarity::Neutral),
            1 => Some(Polarity::Positive),
            _ => None,
        }
    }

    pub fn from_sign(x: f64) -> Polarity {
        if x > 0.0 {
            Polarity::Positive
        } else if x < 0.0 {
            Polarity::Negative
        } else {
            Polarity::Neutral
        }
    }

    pub fn negate(self) -> Polarity {
        match self {
            Polarity::Negative => Polarity::Positive,
            Polarity::Neutral => Polarity::Neutral,
            Polarity::Positive => Polarity::Negative,
        }
    }

    /// Class index used by the classifiers: -1 → 0, 0 → 1, +1 → 2.
    pub fn class_index(self) -> usize {
        (self.value() + 1) as usize
    }

    pub fn from_class_index(i: usize) -> Option<Polarity> {
        Polarity::from_value(i as i64 - 1)
    }

    pub fn is_neutral(self) -> bool {
        self == Polarity::Neutral
    }
}

impl Serialize for Polarity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Set of Plutchik emotions associated with a word.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EmotionSet(u8);

impl EmotionSet {
    pub const LEN: usize = 8;
    pub const NAMES: [&'static str; 8] = [
        "anger",
        "joy",
        "fear",
        "trust",
        "anticipation",
        "sadness",
        "disgust",
        "surprise",
    ];

    pub fn empty() -> Self {
        EmotionSet(0)
    }

    pub fn from_flags(flags: &[bool]) -> Self {
        let mut set = EmotionSet(0);
        for (i, &f) in flags.iter().enumerate().take(Self::LEN) {
            set.set(i, f);
        }
        set
    }

    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut set = EmotionSet(0);
        for name in names {
            let i = Self::index_of(name)
                .ok_or_else(|| Error::InvalidInput(format!("unknown emotion `{name}`")))?;
            set.set(i, true);
        }
        Ok(set)
    }

    pub fn index_of(name: &str) -> Option<usize> {
        let name = name.trim().to_ascii_lowercase();
        Self::NAMES.iter().position(|n| *n == name)
    }

    pub fn contains(self, i: usize) -> bool {
        i < Self::LEN && self.0 & (1 << i) != 0
    }

    pub fn set(&mut self, i: usize, on: bool) {
        assert!(i < Self::LEN, "emotion index {i} out of range");
        if on {
            self.0 |= 1 << i;
        } else {
            self.0 &= !(1 << i);
        }
    }

    pub fn union(self, other: EmotionSet) -> EmotionSet {
        EmotionSet(self.0 | other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn flags(self) -> [bool; 8] {
        std::array::from_fn(|i| self.contains(i))
    }

    pub fn names(self) -> Vec<&'static str> {
        (0..Self::LEN).filter(|&i| self.contains(i)).map(|i| Self::NAMES[i]).collect()
    }
}

/// Value of one aspect for one (word, POS).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Polar(Polarity),
    /// Power/agency class index in `0..4`.
    FourWay(u8),
    Emotions(EmotionSet),
}

/// Names of the four power/agency classes, in class-index order.
pub const FOUR_WAY_NAMES: [&str; 4] = ["agent", "theme", "equal", "neutral"];

impl Label {
    /// Class index for single-label aspects; `None` for emotion sets.
    pub fn class_index(&self) -> Option<usize> {
        match *self {
            Label::Polar(p) => Some(p.class_index()),
            Label::FourWay(c) => Some(c as usize),
            Label::Emotions(_) => None,
        }
    }

    pub fn from_class_index(aspect: Aspect, index: usize) -> Option<Label> {
        if aspect.is_emotion() {
            None
        } else if aspect.is_four_way() {
            (index < 4).then_some(Label::FourWay(index as u8))
        } else {
            Polarity::from_class_index(index).map(Label::Polar)
        }
    }

    pub fn polarity(&self) -> Option<Polarity> {
        match *self {
            Label::Polar(p) => Some(p),
            _ => None,
        }
    }

    pub fn emotions(&self) -> Option<EmotionSet> {
        match *self {
            Label::Emotions(e) => Some(e),
            _ => None,
        }
    }

    /// "Neutral" in the sense used by the divergence analysis: a zero
    /// polarity, the neutral power/agency class, or an empty emotion set.
    pub fn is_neutral(&self) -> bool {
        match *self {
            Label::Polar(p) => p.is_neutral(),
            Label::FourWay(c) => c == 3,
            Label::Emotions(e) => e.is_empty(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match *self {
            Label::Polar(p) => serde_json::Value::from(p.value()),
            Label::FourWay(c) => serde_json::Value::from(c),
            Label::Emotions(e) => serde_json::Value::from(e.names()),
        }
    }

    pub fn from_json(aspect: Aspect, value: &serde_json::Value) -> Result<Label> {
        let bad = || Error::InvalidInput(format!("invalid value {value} for aspect {aspect}"));
        if aspect.is_emotion() {
            let items = value.as_array().ok_or_else(bad)?;
            let names = items
                .iter()
                .map(|v| v.as_str().ok_or_else(bad))
                .collect::<Result<Vec<_>>>()?;
            return EmotionSet::from_names(names).map(Label::Emotions);
        }
        let v = value.as_i64().ok_or_else(bad)?;
        if aspect.is_four_way() {
            if (0..4).contains(&v) {
                Ok(Label::FourWay(v as u8))
            } else {
                Err(bad())
            }
        } else {
            Polarity::from_value(v).map(Label::Polar).ok_or_else(bad)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aspect_names_round_trip() {
        for a in Aspect::all() {
            assert_eq!(a.as_str().parse::<Aspect>().unwrap(), a);
        }
        assert_eq!("P(wt)".parse::<Aspect>().unwrap(), Aspect::PerspWriterTheme);
        assert_eq!("Emo".parse::<Aspect>().unwrap(), Aspect::Emotion);
    }

    #[test]
    fn aspects_partition_by_pos() {
        for a in Aspect::NOUN_ADJ {
            assert!(a.applies_to(Pos::Noun) && a.applies_to(Pos::Adjective));
            assert!(!a.applies_to(Pos::Verb));
        }
        for a in Aspect::VERB {
            assert!(a.applies_to(Pos::Verb) && !a.applies_to(Pos::Noun));
        }
    }

    #[test]
    fn class_coding_is_a_bijection() {
        for a in Aspect::all().filter(|a| !a.is_emotion()) {
            for i in 0..a.num_outputs() {
                let label = Label::from_class_index(a, i).unwrap();
                assert_eq!(label.class_index(), Some(i));
            }
            assert!(Label::from_class_index(a, a.num_outputs()).is_none());
        }
        assert_eq!(Polarity::from_class_index(1), Some(Polarity::Neutral));
    }

    #[test]
    fn emotion_set_order_is_fixed() {
        let set = EmotionSet::from_names(["fear", "disgust"]).unwrap();
        assert_eq!(set.names(), vec!["fear", "disgust"]);
        assert_eq!(set.len(), 2);
        assert!(set.contains(2) && set.contains(6));
        assert!(EmotionSet::from_names(["positive"]).is_err());
    }

    #[test]
    fn loose_pos_parsing() {
        assert_eq!(Pos::parse_loose("[NN]"), Some(Pos::Noun));
        assert_eq!(Pos::parse_loose("JJ"), Some(Pos::Adjective));
        assert_eq!(Pos::parse_loose("adj"), Some(Pos::Adjective));
        assert_eq!(Pos::parse_loose("VBZ"), Some(Pos::Verb));
        assert_eq!(Pos::parse_loose("RB"), None);
    }

    #[test]
    fn label_json_round_trip() {
        let cases = [
            (Aspect::Impact, Label::Polar(Polarity::Negative)),
            (Aspect::Power, Label::FourWay(2)),
            (Aspect::Emotion, Label::Emotions(EmotionSet::from_names(["trust"]).unwrap())),
        ];
        for (aspect, label) in cases {
            assert_eq!(Label::from_json(aspect, &label.to_json()).unwrap(), label);
        }
        assert!(Label::from_json(Aspect::Impact, &serde_json::json!(2)).is_err());
    }
}
