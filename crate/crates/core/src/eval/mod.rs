//! Intrinsic evaluation: metrics, embedding-space neighbors, label purity
//! and significance testing.

pub mod metrics;
pub mod purity;
pub mod significance;
pub mod space;

pub use metrics::{cohen_kappa, confusion_matrix, fleiss_kappa, macro_f1, per_class_f1};
pub use purity::{purity_csv, purity_ratio, purity_table, PurityConfig, PurityResult, ZeroDenominator};
pub use significance::{approx_randomization, paired_randomization, p_value, Significance};
pub use space::{format_key, parse_key, EmbeddingSpace, Key, Neighbor, SpaceTag};
