//! Paired approximate randomization test.
//!
//! Each round swaps the two systems' outputs on every example independently
//! with probability 1/2 and recomputes the statistic. Rounds run in blocks
//! of [`BLOCK`] with one derived seed per block, so the result does not
//! depend on the thread count.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::rng::{derive_seed, rng_from};

pub const BLOCK: usize = 1000;
pub const DEFAULT_ROUNDS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    pub metric: String,
    /// Observed statistic of system a minus system b.
    pub delta: f64,
    pub p: f64,
    #[serde(rename = "R")]
    pub rounds: usize,
    pub seed: u64,
}

/// Statistic values of `rounds` randomly swapped copies of the paired
/// outputs.
pub fn shuffled_statistics<T, F>(a: &[T], b: &[T], rounds: usize, seed: u64, stat: F) -> Result<Vec<f64>>
where
    T: Clone + Sync,
    F: Fn(&[T], &[T]) -> f64 + Sync,
{
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "paired outputs differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if rounds == 0 {
        return Err(Error::InvalidInput("randomization needs at least one round".into()));
    }
    let blocks = rounds.div_ceil(BLOCK);
    let out: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|bi| {
            let mut rng = rng_from(derive_seed(seed, bi as u64));
            let n_rounds = BLOCK.min(rounds - bi * BLOCK);
            let mut xa = a.to_vec();
            let mut xb = b.to_vec();
            (0..n_rounds)
                .map(|_| {
                    for i in 0..a.len() {
                        if rng.gen::<bool>() {
                            xa[i] = b[i].clone();
                            xb[i] = a[i].clone();
                        } else {
                            xa[i] = a[i].clone();
                            xb[i] = b[i].clone();
                        }
                    }
                    stat(&xa, &xb)
                })
                .collect()
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

/// `(1 + #{|shuffled| >= |observed|}) / (1 + R)`. Differences below a
/// relative 1e-12 count as ties so summation-order noise cannot flip them.
pub fn p_value(observed: f64, shuffled: &[f64]) -> f64 {
    let target = observed.abs() * (1.0 - 1e-12) - 1e-15;
    let hits = shuffled.iter().filter(|d| d.abs() >= target).count();
    (1 + hits) as f64 / (1 + shuffled.len()) as f64
}

/// Two-sided test of `stat(a, b)` under random paired swaps. Returns the
/// observed statistic and the p-value.
pub fn paired_randomization<T, F>(a: &[T], b: &[T], rounds: usize, seed: u64, stat: F) -> Result<(f64, f64)>
where
    T: Clone + Sync,
    F: Fn(&[T], &[T]) -> f64 + Sync,
{
    let shuffled = shuffled_statistics(a, b, rounds, seed, &stat)?;
    let observed = stat(a, b);
    Ok((observed, p_value(observed, &shuffled)))
}

fn mean_difference(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.iter().zip(b).map(|(x, y)| x - y).sum::<f64>() / a.len() as f64
}

/// Randomization test on paired per-example scores, comparing means.
pub fn approx_randomization(a: &[f64], b: &[f64], rounds: usize, seed: u64) -> Result<Significance> {
    let (delta, p) = paired_randomization(a, b, rounds, seed, mean_difference)?;
    Ok(Significance {
        metric: "mean".into(),
        delta,
        p,
        rounds,
        seed,
    })
}
