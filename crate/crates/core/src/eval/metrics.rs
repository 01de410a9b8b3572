//! Classification and agreement metrics.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Counts `[gold][pred]` over the given class list; labels outside
/// `classes` are ignored.
pub fn confusion_matrix<T: PartialEq>(preds: &[T], golds: &[T], classes: &[T]) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0usize; classes.len()]; classes.len()];
    for (p, g) in preds.iter().zip(golds) {
        let (Some(pi), Some(gi)) = (
            classes.iter().position(|c| c == p),
            classes.iter().position(|c| c == g),
        ) else {
            continue;
        };
        m[gi][pi] += 1;
    }
    m
}

/// Per-class F1 from a `[gold][pred]` confusion matrix. A class with no
/// gold and no predicted instances scores 0.
pub fn per_class_f1(confusion: &[Vec<usize>]) -> Vec<f64> {
    let k = confusion.len();
    (0..k)
        .map(|c| {
            let tp = confusion[c][c] as f64;
            let gold: usize = confusion[c].iter().sum();
            let pred: usize = confusion.iter().map(|row| row[c]).sum();
            let denom = (gold + pred) as f64;
            if denom == 0.0 {
                0.0
            } else {
                2.0 * tp / denom
            }
        })
        .collect()
}

/// Unweighted mean of per-class F1 over `classes`.
pub fn macro_f1<T: PartialEq>(preds: &[T], golds: &[T], classes: &[T]) -> f64 {
    assert_eq!(preds.len(), golds.len(), "prediction and gold lengths differ");
    if classes.is_empty() {
        return 0.0;
    }
    let f1 = per_class_f1(&confusion_matrix(preds, golds, classes));
    f1.iter().sum::<f64>() / f1.len() as f64
}

/// Fleiss' kappa from per-item category counts. Every row must sum to the
/// same number of raters (at least two).
pub fn fleiss_kappa(counts: &[Vec<usize>]) -> Result<f64> {
    let n_items = counts.len();
    if n_items == 0 {
        return Err(Error::InvalidInput("fleiss kappa over zero items".into()));
    }
    let raters: usize = counts[0].iter().sum();
    if raters < 2 {
        return Err(Error::InvalidInput("fleiss kappa needs at least two raters".into()));
    }
    if counts.iter().any(|row| row.iter().sum::<usize>() != raters || row.len() != counts[0].len())
    {
        return Err(Error::InvalidInput("every item needs the same number of ratings".into()));
    }
    let n = raters as f64;
    let total = n_items as f64 * n;
    let k = counts[0].len();
    let p_j: Vec<f64> = (0..k)
        .map(|j| counts.iter().map(|row| row[j]).sum::<usize>() as f64 / total)
        .collect();
    let p_bar = counts
        .iter()
        .map(|row| {
            let sq: f64 = row.iter().map(|&c| (c * c) as f64).sum();
            (sq - n) / (n * (n - 1.0))
        })
        .sum::<f64>()
        / n_items as f64;
    let p_e: f64 = p_j.iter().map(|p| p * p).sum();
    if (1.0 - p_e).abs() < 1e-15 {
        // Every rating falls in one category.
        return Ok(1.0);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

/// Cohen's kappa between two raters over the same items.
pub fn cohen_kappa<T: Ord + Clone>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidInput(
            "cohen kappa needs two non-empty rating lists of equal length".into(),
        ));
    }
    let n = a.len() as f64;
    let observed = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let cats: BTreeSet<&T> = a.iter().chain(b.iter()).collect();
    let expected: f64 = cats
        .iter()
        .map(|c| {
            let ca = a.iter().filter(|x| x == c).count() as f64;
            let cb = b.iter().filter(|x| x == c).count() as f64;
            (ca / n) * (cb / n)
        })
        .sum();
    if (1.0 - expected).abs() < 1e-15 {
        return Ok(1.0);
    }
    Ok((observed - expected) / (1.0 - expected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn perfect_predictions() {
        let g = [0, 1, 2, 1, 0];
        assert_eq!(macro_f1(&g, &g, &[0, 1, 2]), 1.0);
    }

    #[test]
    fn single_class_predictor_on_uniform_gold() {
        // gold uniform over 3 classes (3 each), everything predicted as 0:
        // class 0 F1 = 2*3/(3+9) = 0.5, others 0 -> macro 1/6.
        let gold = [0, 0, 0, 1, 1, 1, 2, 2, 2];
        let pred = [0; 9];
        assert_abs_diff_eq!(macro_f1(&pred, &gold, &[0, 1, 2]), 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn absent_class_counts_as_zero() {
        // class 2 never appears: F1s (1, 1, 0)
        let g = [0, 1, 0, 1];
        assert_abs_diff_eq!(macro_f1(&g, &g, &[0, 1, 2]), 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn fleiss_wikipedia_example() {
        // Ten items, 14 raters, five categories; kappa = 0.210.
        let counts = vec![
            vec![0, 0, 0, 0, 14],
            vec![0, 2, 6, 4, 2],
            vec![0, 0, 3, 5, 6],
            vec![0, 3, 9, 2, 0],
            vec![2, 2, 8, 1, 1],
            vec![7, 7, 0, 0, 0],
            vec![3, 2, 6, 3, 0],
            vec![2, 5, 3, 2, 2],
            vec![6, 5, 2, 1, 0],
            vec![0, 2, 2, 3, 7],
        ];
        assert_abs_diff_eq!(fleiss_kappa(&counts).unwrap(), 0.20993070442195522, epsilon = 1e-12);
    }

    #[test]
    fn fleiss_rejects_ragged_rows() {
        assert!(fleiss_kappa(&[vec![2, 0], vec![1, 0]]).is_err());
        assert!(fleiss_kappa(&[vec![1, 0]]).is_err());
        assert!(fleiss_kappa(&[]).is_err());
    }

    #[test]
    fn cohen_simple() {
        // po = 0.6, pe = 0.5*0.5 + 0.5*0.5 = 0.5 -> 0.2
        let a = [1, 1, 1, 1, 1, 0, 0, 0, 0, 0];
        let b = [1, 1, 1, 0, 0, 0, 0, 1, 1, 0];
        assert_abs_diff_eq!(cohen_kappa(&a, &b).unwrap(), 0.2, epsilon = 1e-12);
        assert_eq!(cohen_kappa(&[3, 3], &[3, 3]).unwrap(), 1.0);
    }

    proptest! {
        #[test]
        fn macro_f1_invariant_under_relabeling(
            pairs in prop::collection::vec((0usize..3, 0usize..3), 1..40),
            perm in Just([2usize, 0, 1]),
        ) {
            let (p, g): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            let base = macro_f1(&p, &g, &[0, 1, 2]);
            let rp: Vec<_> = p.iter().map(|&x| perm[x]).collect();
            let rg: Vec<_> = g.iter().map(|&x| perm[x]).collect();
            let relabeled = macro_f1(&rp, &rg, &[0, 1, 2]);
            prop_assert!((base - relabeled).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&base));
        }
    }
}
