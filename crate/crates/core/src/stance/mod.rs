//! Stance detection: corpus handling, the BoWV baseline, BiC models and
//! per-topic evaluation.

pub mod bowv;
pub mod config;
pub mod data;
pub mod evaluate;
pub mod model;
pub mod train;

pub use config::{AttentionKind, StanceConfig};
pub use data::{StanceExample, StanceLabel, StanceSplits, Token};
