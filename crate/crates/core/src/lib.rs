//! Connotation lexicon induction, connotation embeddings and their use in
//! stance detection.

pub mod aspect;
pub mod diagnostics;
pub mod embeddings;
pub mod encoder;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod numerics;
pub mod split;
pub mod synonyms;
pub mod synthetic;
pub mod stance;
pub mod text;

pub use error::{Error, Result};
