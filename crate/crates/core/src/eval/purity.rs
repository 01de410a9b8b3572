//! Neighbor-cluster label purity of an embedding space.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::space::EmbeddingSpace;
use crate::aspect::{Aspect, Polarity};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;

/// What to do when a seed word has no opposite-labeled neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroDenominator {
    /// Divide by `max(1, count_opposite)`.
    #[default]
    Floor,
    /// Leave such seeds out of the average.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PurityConfig {
    pub k: usize,
    pub zero_denominator: ZeroDenominator,
}

impl Default for PurityConfig {
    fn default() -> Self {
        PurityConfig {
            k: 50,
            zero_denominator: ZeroDenominator::Floor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurityResult {
    pub aspect: Aspect,
    pub label: Polarity,
    pub space: super::space::SpaceTag,
    pub ratio: f64,
    /// Seed words with label `label` that were averaged over.
    pub seeds: usize,
}

/// Average over the words labeled `label` for `aspect` of
/// `#neighbors labeled label / max(1, #neighbors labeled -label)` within
/// each word's k nearest neighbors. Neighbors that are neutral or lack the
/// aspect are ignored.
pub fn purity_ratio(
    aspect: Aspect,
    label: Polarity,
    space: &EmbeddingSpace,
    lexicon: &Lexicon,
    cfg: &PurityConfig,
) -> Result<PurityResult> {
    if aspect.is_emotion() || aspect.is_four_way() {
        return Err(Error::InvalidInput(format!("purity needs a polar aspect, got {aspect}")));
    }
    if label.is_neutral() {
        return Err(Error::InvalidInput("purity is defined for non-neutral labels".into()));
    }
    let polarity = |i: usize| {
        let (w, p) = &space.keys()[i];
        lexicon.label(w, *p, aspect).and_then(|l| l.polarity())
    };
    let labels: Vec<Option<Polarity>> = (0..space.len()).map(polarity).collect();
    let seeds: Vec<usize> = (0..space.len()).filter(|&i| labels[i] == Some(label)).collect();
    if seeds.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no words labeled {label} for {aspect} in the {} space",
            space.tag
        )));
    }
    let opposite = label.negate();
    let per_seed: Vec<Option<f64>> = seeds
        .par_iter()
        .map(|&q| {
            let nbrs = space.knn_indices(q, cfg.k)?;
            let same = nbrs.iter().filter(|(i, _)| labels[*i] == Some(label)).count();
            let opp = nbrs.iter().filter(|(i, _)| labels[*i] == Some(opposite)).count();
            Ok(match (opp, cfg.zero_denominator) {
                (0, ZeroDenominator::Skip) => None,
                _ => Some(same as f64 / opp.max(1) as f64),
            })
        })
        .collect::<Result<_>>()?;
    let used: Vec<f64> = per_seed.into_iter().flatten().collect();
    let ratio = if used.is_empty() {
        0.0
    } else {
        used.iter().sum::<f64>() / used.len() as f64
    };
    Ok(PurityResult {
        aspect,
        label,
        space: space.tag,
        ratio,
        seeds: used.len(),
    })
}

/// Ratios for every polar aspect in `aspects` and both non-neutral labels.
/// Combinations without seed words are skipped.
pub fn purity_table(
    aspects: &[Aspect],
    space: &EmbeddingSpace,
    lexicon: &Lexicon,
    cfg: &PurityConfig,
) -> Result<Vec<PurityResult>> {
    let mut out = Vec::new();
    for &a in aspects.iter().filter(|a| !a.is_emotion() && !a.is_four_way()) {
        for c in [Polarity::Positive, Polarity::Negative] {
            match purity_ratio(a, c, space, lexicon, cfg) {
                Ok(r) => out.push(r),
                Err(Error::InvalidInput(msg)) if msg.starts_with("no words labeled") => {
                    log::warn!("{msg}");
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

pub fn purity_csv(rows: &[PurityResult]) -> String {
    let mut out = String::from("aspect,label,space,ratio,seeds\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{:.6},{}", r.aspect, r.label, r.space, r.ratio, r.seeds);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aspect::{Label, Pos};
    use crate::eval::space::SpaceTag;
    use crate::lexicon::{LexiconEntry, Source};
    use crate::numerics::rng::rng_from;
    use rand::Rng;

    fn fixture(points: &[(&str, [f64; 2], Option<i64>)]) -> (EmbeddingSpace, Lexicon) {
        let mut space = EmbeddingSpace::new(SpaceTag::Connotation, 2);
        let mut lex = Lexicon::new();
        for (w, v, l) in points {
            space.insert(w, Pos::Noun, v).unwrap();
            if let Some(l) = l {
                lex.insert(LexiconEntry::new(*w, Pos::Noun).with_label(
                    Aspect::Sentiment,
                    Label::Polar(Polarity::from_value(*l).unwrap()),
                    Source::Cwn,
                ));
            }
        }
        (space, lex)
    }

    #[test]
    fn ten_point_fixture() {
        let (space, lex) = fixture(&[
            ("a", [0.0, 0.0], Some(1)),
            ("b", [1.0, 0.0], Some(1)),
            ("c", [0.0, 1.0], Some(1)),
            ("d", [5.0, 5.0], Some(-1)),
            ("e", [5.0, 6.0], Some(-1)),
            ("f", [1.0, 1.0], Some(0)),
            ("g", [6.0, 5.0], Some(-1)),
            ("h", [2.0, 0.0], None),
            ("i", [6.0, 6.0], Some(1)),
            ("j", [0.0, 2.0], Some(-1)),
        ]);
        let cfg = PurityConfig { k: 3, ..Default::default() };
        // per-seed ratios from an independent script: + [2, 1, 1, 0], - [2, 2, 2, 0]
        let pos = purity_ratio(Aspect::Sentiment, Polarity::Positive, &space, &lex, &cfg).unwrap();
        assert_eq!((pos.ratio, pos.seeds), (1.0, 4));
        let neg = purity_ratio(Aspect::Sentiment, Polarity::Negative, &space, &lex, &cfg).unwrap();
        assert_eq!((neg.ratio, neg.seeds), (1.5, 4));
        let skip = PurityConfig { k: 3, zero_denominator: ZeroDenominator::Skip };
        // "a" and "b" have no - neighbor; c gives 1/1 and i gives 0/3
        let r = purity_ratio(Aspect::Sentiment, Polarity::Positive, &space, &lex, &skip).unwrap();
        assert_eq!((r.ratio, r.seeds), (0.5, 2));
    }

    #[test]
    fn pure_cluster_hits_the_floor() {
        let k = 5;
        let mut pts: Vec<(String, [f64; 2], Option<i64>)> =
            (0..=k).map(|i| (format!("s{i}"), [i as f64 * 0.01, 0.0], Some(1))).collect();
        pts.push(("far".into(), [100.0, 0.0], Some(-1)));
        let pts: Vec<(&str, [f64; 2], Option<i64>)> = pts.iter().map(|(w, v, l)| (w.as_str(), *v, *l)).collect();
        let (space, lex) = fixture(&pts);
        let r = purity_ratio(Aspect::Sentiment, Polarity::Positive, &space, &lex, &PurityConfig { k, ..Default::default() })
            .unwrap();
        assert_eq!(r.ratio, k as f64);
    }

    #[test]
    fn errors() {
        let (space, lex) = fixture(&[("a", [0.0, 0.0], Some(1)), ("b", [1.0, 0.0], Some(0))]);
        let cfg = PurityConfig { k: 1, ..Default::default() };
        assert!(purity_ratio(Aspect::Sentiment, Polarity::Negative, &space, &lex, &cfg).is_err());
        assert!(purity_ratio(Aspect::Sentiment, Polarity::Neutral, &space, &lex, &cfg).is_err());
        assert!(purity_ratio(Aspect::Emotion, Polarity::Positive, &space, &lex, &cfg).is_err());
    }

    /// Full distance matrix, full sort, direct counting.
    fn oracle(points: &[(String, [f64; 2], Option<i64>)], c: i64, k: usize) -> f64 {
        let mut ratios = Vec::new();
        for (qi, (_, qv, ql)) in points.iter().enumerate() {
            if *ql != Some(c) {
                continue;
            }
            let mut d: Vec<(f64, &str, usize)> = points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != qi)
                .map(|(j, (w, v, _))| ((v[0] - qv[0]).powi(2) + (v[1] - qv[1]).powi(2), w.as_str(), j))
                .collect();
            d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(b.1)));
            let same = d[..k].iter().filter(|x| points[x.2].2 == Some(c)).count() as f64;
            let opp = d[..k].iter().filter(|x| points[x.2].2 == Some(-c)).count() as f64;
            ratios.push(same / opp.max(1.0));
        }
        ratios.iter().sum::<f64>() / ratios.len() as f64
    }

    #[test]
    fn matches_brute_force_oracle() {
        let mut rng = rng_from(11);
        for trial in 0..50 {
            let n = rng.gen_range(5..=200);
            // small integer grid so ties are frequent
            let points: Vec<(String, [f64; 2], Option<i64>)> = (0..n)
                .map(|i| {
                    let l = match rng.gen_range(0..4) {
                        0 => None,
                        x => Some(x as i64 - 2),
                    };
                    (format!("w{i}"), [rng.gen_range(0..8) as f64, rng.gen_range(0..8) as f64], l)
                })
                .collect();
            let refs: Vec<(&str, [f64; 2], Option<i64>)> = points.iter().map(|(w, v, l)| (w.as_str(), *v, *l)).collect();
            let (space, lex) = fixture(&refs);
            let k = rng.gen_range(1..n.min(60));
            for c in [1, -1] {
                if !points.iter().any(|p| p.2 == Some(c)) {
                    continue;
                }
                let got = purity_ratio(
                    Aspect::Sentiment,
                    Polarity::from_value(c).unwrap(),
                    &space,
                    &lex,
                    &PurityConfig { k, ..Default::default() },
                )
                .unwrap();
                assert_eq!(got.ratio, oracle(&points, c, k), "trial {trial}, c {c}");
            }
        }
    }
}
