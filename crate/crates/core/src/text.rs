//! Tokenization and stopword filtering shared by the definition encoder and
//! the stance pipeline.

use std::collections::HashSet;
use std::sync::OnceLock;

const STOPWORDS: &str = "a about above after again against all am an and any are as at be because \
been before being below between both but by can could did do does doing down during each few for \
from further had has have having he her here hers herself him himself his how i if in into is it \
its itself just me more most my myself no nor not now of off on once only or other our ours \
ourselves out over own same she should so some such than that the their theirs them themselves \
then there these they this those through to too under until up very was we were what when where \
which while who whom why will with would you your yours yourself yourselves s t d ll m o re ve y \
also may might must shall us";

pub fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| STOPWORDS.split_whitespace().collect())
}

pub fn is_stopword(w: &str) -> bool {
    stopwords().contains(w)
}

/// Lowercases and splits on anything that is not alphanumeric, so
/// punctuation never survives as a token.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Tokenizes and drops stopwords.
pub fn content_tokens(text: &str) -> Vec<String> {
    tokenize(text).into_iter().filter(|t| !is_stopword(t)).collect()
}

/// True when the string has at least one alphanumeric character.
pub fn has_word_chars(s: &str) -> bool {
    s.chars().any(char::is_alphanumeric)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_and_filters() {
        assert_eq!(tokenize("The Cat's hat, ok?"), vec!["the", "cat", "s", "hat", "ok"]);
        assert_eq!(content_tokens("A person who is NOT kind."), vec!["person", "kind"]);
        assert!(!has_word_chars("--!"));
    }
}
