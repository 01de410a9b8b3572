//! Agreement between human annotators and between humans and the lexicon.

use serde::Serialize;

use crate::aspect::Polarity;
use crate::error::{Error, Result};
use crate::eval::metrics::{cohen_kappa, fleiss_kappa};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub words: usize,
    pub fleiss_kappa: f64,
    /// Mean over words of the percentage of agreeing annotator pairs.
    pub mean_pairwise_pct: f64,
    /// Percentage of words whose lexicon label equals the annotator majority.
    pub lexicon_pct: f64,
    /// Like `lexicon_pct`, but only a (+, -) pair counts as disagreement.
    pub lexicon_nc_pct: f64,
    /// Cohen's kappa between the majority label and the lexicon.
    pub cohen_kappa: f64,
    /// Words without a unique plurality label among annotators.
    pub excluded_no_majority: usize,
}

/// The unique most frequent label, or `None` on a tie for first place.
pub fn majority_label(labels: &[Polarity]) -> Option<Polarity> {
    let counts = [Polarity::Negative, Polarity::Neutral, Polarity::Positive]
        .map(|p| (labels.iter().filter(|&&l| l == p).count(), p));
    let best = counts.iter().map(|c| c.0).max()?;
    let mut top = counts.iter().filter(|c| c.0 == best);
    let first = top.next()?;
    if top.next().is_some() || best == 0 {
        None
    } else {
        Some(first.1)
    }
}

fn non_conflicting(a: Polarity, b: Polarity) -> bool {
    !matches!(
        (a, b),
        (Polarity::Positive, Polarity::Negative) | (Polarity::Negative, Polarity::Positive)
    )
}

/// `annotations[w][k]` is annotator `k`'s label for word `w`; `lexicon[w]`
/// is the lexicon's label for the same word.
pub fn agreement_metrics(annotations: &[Vec<Polarity>], lexicon: &[Polarity]) -> Result<AgreementReport> {
    if annotations.is_empty() {
        return Err(Error::InvalidInput("no annotated words".into()));
    }
    if annotations.len() != lexicon.len() {
        return Err(Error::InvalidInput(format!(
            "{} annotated words but {} lexicon labels",
            annotations.len(),
            lexicon.len()
        )));
    }
    let raters = annotations[0].len();
    if raters < 2 {
        return Err(Error::InvalidInput("agreement needs at least two annotators".into()));
    }
    if annotations.iter().any(|row| row.len() != raters) {
        return Err(Error::InvalidInput("every word needs one label per annotator".into()));
    }

    let counts: Vec<Vec<usize>> = annotations
        .iter()
        .map(|row| {
            [Polarity::Negative, Polarity::Neutral, Polarity::Positive]
                .iter()
                .map(|p| row.iter().filter(|l| *l == p).count())
                .collect()
        })
        .collect();
    let fleiss = fleiss_kappa(&counts)?;

    let pairs = (raters * (raters - 1) / 2) as f64;
    let mean_pairwise_pct = 100.0
        * annotations
            .iter()
            .map(|row| {
                let mut agree = 0usize;
                for i in 0..raters {
                    for j in i + 1..raters {
                        agree += usize::from(row[i] == row[j]);
                    }
                }
                agree as f64 / pairs
            })
            .sum::<f64>()
        / annotations.len() as f64;

    let mut majority = Vec::new();
    let mut lex = Vec::new();
    for (row, &l) in annotations.iter().zip(lexicon) {
        if let Some(m) = majority_label(row) {
            majority.push(m);
            lex.push(l);
        }
    }
    let excluded = annotations.len() - majority.len();
    if majority.is_empty() {
        return Err(Error::InvalidInput("no word has a majority annotator label".into()));
    }
    let kept = majority.len() as f64;
    let lexicon_pct =
        100.0 * majority.iter().zip(&lex).filter(|(m, l)| m == l).count() as f64 / kept;
    let lexicon_nc_pct = 100.0
        * majority.iter().zip(&lex).filter(|(m, l)| non_conflicting(**m, **l)).count() as f64
        / kept;

    Ok(AgreementReport {
        words: annotations.len(),
        fleiss_kappa: fleiss,
        mean_pairwise_pct,
        lexicon_pct,
        lexicon_nc_pct,
        cohen_kappa: cohen_kappa(&majority, &lex)?,
        excluded_no_majority: excluded,
    })
}
