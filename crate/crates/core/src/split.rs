use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];
    /// Target share of each split.
    pub const FRACTIONS: [f64; 3] = [0.6, 0.2, 0.2];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "dev" | "development" | "valid" | "validation" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            _ => Err(Error::InvalidInput(format!("unknown split `{s}`"))),
        }
    }
}

/// Target item counts for a 60/20/20 partition of `n` items.
pub fn target_counts(n: usize) -> [usize; 3] {
    let train = (0.6 * n as f64).round() as usize;
    let dev = ((0.2 * n as f64).round() as usize).min(n - train);
    [train, dev, n - train - dev]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets() {
        assert_eq!(target_counts(10), [6, 2, 2]);
        assert_eq!(target_counts(0), [0, 0, 0]);
        assert_eq!(target_counts(1), [1, 0, 0]);
        assert_eq!(target_counts(7), [4, 1, 2]);
    }
}
