//! Dense numerics for the connotation and stance models: tensors, LSTMs,
//! attention, losses, Adam, finite-difference checks, L-BFGS logistic
//! regression and checkpoints.

pub mod adam;
pub mod attention;
pub mod checkpoint;
pub mod dropout;
pub mod gradcheck;
pub mod lbfgs;
pub mod linear;
pub mod loss;
pub mod logistic;
pub mod lstm;
pub mod params;
pub mod rng;
pub mod tensor;

pub use adam::{AdamConfig, AdamState};
pub use attention::{attention_backward, attention_forward, scaled_dot_attention, AttentionTrace};
pub use checkpoint::Checkpoint;
pub use gradcheck::grad_check;
pub use linear::Linear;
pub use loss::{binary_ova_xent, weighted_softmax_xent};
pub use lstm::{bilstm_backward, bilstm_encode, bilstm_forward, BiLstmParams, BiState, LstmParams};
pub use params::Parameters;
pub use tensor::Tensor;

/// Sums `f` over `items` in fixed-size chunks processed in parallel, then
/// merges the chunk results in order, so the total does not depend on the
/// number of worker threads.
pub fn chunked_sum<T, G, F>(items: &[T], chunk: usize, zero: &G, f: F) -> crate::error::Result<(f64, G)>
where
    T: Sync,
    G: Parameters + Send + Sync,
    F: Fn(usize, &T, &mut G) -> crate::error::Result<f64> + Sync,
{
    use rayon::prelude::*;
    let parts: Vec<crate::error::Result<(f64, G)>> = items
        .par_chunks(chunk.max(1))
        .enumerate()
        .map(|(ci, xs)| {
            let mut g = zero.clone();
            let mut loss = 0.0;
            for (k, x) in xs.iter().enumerate() {
                loss += f(ci * chunk.max(1) + k, x, &mut g)?;
            }
            Ok((loss, g))
        })
        .collect();
    let mut total = 0.0;
    let mut grad = zero.clone();
    for p in parts {
        let (l, g) = p?;
        total += l;
        grad.add_assign(&g);
    }
    Ok((total, grad))
}
