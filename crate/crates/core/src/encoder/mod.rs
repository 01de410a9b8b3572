pub mod config;
pub mod data;
pub mod model;
pub mod evaluate;
pub mod train;
pub mod baselines;
