use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use anyhow::Result;
use connotation::aspect::{Aspect, Label, Pos};
use connotation::encoder::evaluate::aspect_macro_f1;
use connotation::eval::{
    approx_randomization, paired_randomization, parse_key, purity_csv, purity_table, EmbeddingSpace, SpaceTag,
};
use connotation::stance::data::StanceExample;
use connotation::stance::evaluate::{compare_systems, comparison_csv, StancePrediction};
use connotation::stance::StanceLabel;
use connotation::Error;
use serde_json::{json, Value};

use super::{csv_lines, load_embeddings, load_lexicon, read_text};
use crate::args::{KnnPurity, SigKind, SignificanceArgs};
use crate::run::{Run, UsageError};
use crate::table::{f3, f4, render};

pub fn knn_purity(mut run: Run, a: &KnnPurity) -> Result<()> {
    let cfg = run.config.purity;
    let lexicon = load_lexicon(&mut run, &a.lexicon)?;
    let conn = load_embeddings(&mut run, &a.connotation)?;
    let pre = load_embeddings(&mut run, &a.pretrained)?;
    let c_full = EmbeddingSpace::from_keyed(&conn, SpaceTag::Connotation)?;
    // Both spaces are compared over the same vocabulary.
    let p_space = EmbeddingSpace::from_words(&pre, c_full.keys())?;
    let c_space = c_full.filter(|(w, p)| p_space.contains(w, *p));
    if c_space.len() < c_full.len() {
        log::warn!("{} connotation keys have no pretrained vector and were left out", c_full.len() - c_space.len());
    }
    if c_space.is_empty() {
        anyhow::bail!("the connotation and pretrained spaces share no words");
    }
    let aspects: Vec<Aspect> = Aspect::all()
        .filter(|a| !a.is_emotion() && !a.is_four_way() && !a.is_verb_aspect())
        .collect();
    let mut rows = purity_table(&aspects, &c_space, &lexicon, &cfg)?;
    rows.extend(purity_table(&aspects, &p_space, &lexicon, &cfg)?);
    rows.sort_by(|x, y| (x.aspect, x.label.value(), x.space).cmp(&(y.aspect, y.label.value(), y.space)));
    run.write("purity.csv", purity_csv(&rows))?;

    let mut by_combo: BTreeMap<(Aspect, i8), [Option<f64>; 2]> = BTreeMap::new();
    for r in &rows {
        let slot = by_combo.entry((r.aspect, r.label.value())).or_default();
        slot[usize::from(r.space == SpaceTag::Pretrained)] = Some(r.ratio);
    }
    let show = |x: Option<f64>| x.map_or("-".to_string(), f3);
    let body: Vec<Vec<String>> = by_combo
        .iter()
        .map(|((asp, lab), [c, p])| vec![format!("{asp} {lab:+}"), show(*c), show(*p)])
        .collect();
    let table = render(&["aspect label", "r(C)", "r(P)"], &body);

    if !a.queries.is_empty() {
        let mut lines = Vec::new();
        for q in &a.queries {
            let (word, pos) = parse_key(q).map_err(|e| UsageError(format!("--query: {e}")))?;
            for space in [&c_space, &p_space] {
                if !space.contains(&word, pos) {
                    log::warn!("{q} is not in the {} space", space.tag);
                    continue;
                }
                for (rank, n) in space.knn(&word, pos, cfg.k)?.iter().enumerate() {
                    lines.push(format!("{q},{},{},{}|{},{:.6}", space.tag, rank + 1, n.word, n.pos, n.distance));
                }
            }
        }
        run.write("neighbors.csv", csv_lines("query,space,rank,neighbor,distance", &lines, |l| l.clone()))?;
    }
    let summary = json!({ "words": c_space.len(), "k": cfg.k, "zero_denominator": cfg.zero_denominator, "rows": rows });
    run.finish(summary, &table)
}

fn jsonl_values(text: &str, path: &Path) -> Result<Vec<Value>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| Ok(serde_json::from_str(l).map_err(|e| Error::parse(path, i + 1, e.to_string()))?))
        .collect()
}

fn read_stance_predictions(run: &mut Run, path: &Path) -> Result<Vec<StancePrediction>> {
    let text = read_text(run, path)?;
    jsonl_values(&text, path)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| Ok(serde_json::from_value(v).map_err(|e| Error::parse(path, i + 1, e.to_string()))?))
        .collect()
}

type ConnRow = ((String, Pos, Aspect), Label, Label);

fn read_conn_predictions(run: &mut Run, path: &Path) -> Result<Vec<ConnRow>> {
    let text = read_text(run, path)?;
    let mut rows = Vec::new();
    for (i, v) in jsonl_values(&text, path)?.into_iter().enumerate() {
        let bad = |m: String| Error::parse(path, i + 1, m);
        let field = |k: &str| v.get(k).ok_or_else(|| bad(format!("missing `{k}`")));
        let s = |k: &str| -> Result<String> {
            Ok(field(k)?.as_str().ok_or_else(|| bad(format!("`{k}` must be a string")))?.to_string())
        };
        let word = s("word")?;
        let pos = Pos::from_str(&s("pos")?).map_err(|e| bad(e.to_string()))?;
        let aspect = Aspect::from_str(&s("aspect")?).map_err(|e| bad(e.to_string()))?;
        let gold = Label::from_json(aspect, field("gold")?).map_err(|e| bad(e.to_string()))?;
        let pred = Label::from_json(aspect, field("pred")?).map_err(|e| bad(e.to_string()))?;
        rows.push(((word, pos, aspect), gold, pred));
    }
    rows.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(rows)
}

fn read_scores(run: &mut Run, path: &Path) -> Result<Vec<f64>> {
    let text = read_text(run, path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .map_err(|e| Error::parse(path, i + 1, format!("`{}`: {e}", l.trim())).into())
        })
        .collect()
}

fn mismatch(what: &str) -> anyhow::Error {
    UsageError(format!("the two prediction files do not cover the same {what}")).into()
}

pub fn significance(mut run: Run, a: &SignificanceArgs) -> Result<()> {
    let rounds = run.config.significance.rounds;
    let seed = run.seed();
    let (csv, table, summary) = match a.kind {
        SigKind::Scores => {
            let xa = read_scores(&mut run, &a.a)?;
            let xb = read_scores(&mut run, &a.b)?;
            if xa.len() != xb.len() {
                return Err(mismatch("number of scores"));
            }
            let s = approx_randomization(&xa, &xb, rounds, seed)?;
            let csv = format!("metric,n,delta,p\n{},{},{:.6},{:.6}\n", s.metric, xa.len(), s.delta, s.p);
            let table = render(&["metric", "n", "delta", "p"], &[vec![s.metric.clone(), xa.len().to_string(), f4(s.delta), f4(s.p)]]);
            (csv, table, json!({ "kind": "scores", "n": xa.len(), "result": s }))
        }
        SigKind::Stance => {
            let pa = read_stance_predictions(&mut run, &a.a)?;
            let pb = read_stance_predictions(&mut run, &a.b)?;
            if pa.len() != pb.len() || pa.iter().zip(&pb).any(|(x, y)| x.index != y.index || x.topic != y.topic || x.gold != y.gold) {
                return Err(mismatch("test examples"));
            }
            let test: Vec<StanceExample> = pa
                .iter()
                .map(|p| StanceExample {
                    topic: p.topic.clone(),
                    topic_tokens: Vec::new(),
                    tokens: Vec::new(),
                    label: p.gold,
                    author: String::new(),
                })
                .collect();
            let la: Vec<StanceLabel> = pa.iter().map(|p| p.pred).collect();
            let lb: Vec<StanceLabel> = pb.iter().map(|p| p.pred).collect();
            let rows = compare_systems(&test, &la, &lb, rounds, seed)?;
            let table = render(
                &["topic", "n", "F1 a", "F1 b", "p"],
                &rows.iter().map(|r| vec![r.topic.clone(), r.n.to_string(), f4(r.f1_a), f4(r.f1_b), f4(r.p)]).collect::<Vec<_>>(),
            );
            (comparison_csv(&rows, "a", "b"), table, json!({ "kind": "stance", "rounds": rounds, "seed": seed, "rows": rows }))
        }
        SigKind::Conn => {
            let pa = read_conn_predictions(&mut run, &a.a)?;
            let pb = read_conn_predictions(&mut run, &a.b)?;
            if pa.len() != pb.len() || pa.iter().zip(&pb).any(|(x, y)| x.0 != y.0 || x.1 != y.1) {
                return Err(mismatch("words and aspects"));
            }
            let aspects: BTreeSet<Aspect> = pa.iter().map(|r| r.0 .2).collect();
            let mut rows = Vec::new();
            let mut groups: Vec<(String, Vec<usize>)> = vec![("average".into(), (0..pa.len()).collect())];
            groups.extend(aspects.iter().map(|asp| (asp.to_string(), (0..pa.len()).filter(|&i| pa[i].0 .2 == *asp).collect())));
            for (name, idx) in groups {
                let meta: Vec<(Aspect, Label)> = idx.iter().map(|&i| (pa[i].0 .2, pa[i].1)).collect();
                let xa: Vec<Label> = idx.iter().map(|&i| pa[i].2).collect();
                let xb: Vec<Label> = idx.iter().map(|&i| pb[i].2).collect();
                // Mean of per-aspect macro-F1 over the aspects in the group.
                let avg_f1 = |preds: &[Label]| -> f64 {
                    let mut per: BTreeMap<Aspect, (Vec<Label>, Vec<Label>)> = BTreeMap::new();
                    for ((asp, g), p) in meta.iter().zip(preds) {
                        let e = per.entry(*asp).or_default();
                        e.0.push(*g);
                        e.1.push(*p);
                    }
                    per.iter().map(|(asp, (g, p))| aspect_macro_f1(*asp, g, p)).sum::<f64>() / per.len() as f64
                };
                let (_, p) = paired_randomization(&xa, &xb, rounds, connotation::numerics::rng::derive_seed(seed, connotation::numerics::rng::tag(&name)), |x, y| {
                    avg_f1(x) - avg_f1(y)
                })?;
                rows.push(json!({ "aspect": name, "n": idx.len(), "f1_a": avg_f1(&xa), "f1_b": avg_f1(&xb), "p": p }));
            }
            let num = |r: &Value, k: &str| r[k].as_f64().unwrap_or(f64::NAN);
            let csv = csv_lines("aspect,n,f1_a,f1_b,p", &rows, |r| {
                format!("{},{},{:.6},{:.6},{:.6}", r["aspect"].as_str().unwrap_or(""), r["n"], num(r, "f1_a"), num(r, "f1_b"), num(r, "p"))
            });
            let table = render(
                &["aspect", "n", "F1 a", "F1 b", "p"],
                &rows
                    .iter()
                    .map(|r| {
                        vec![r["aspect"].as_str().unwrap_or("").to_string(), r["n"].to_string(), f4(num(r, "f1_a")), f4(num(r, "f1_b")), f4(num(r, "p"))]
                    })
                    .collect::<Vec<_>>(),
            );
            (csv, table, json!({ "kind": "conn", "rounds": rounds, "seed": seed, "rows": rows }))
        }
    };
    run.write("comparison.csv", csv)?;
    run.write("significance.json", serde_json::to_string_pretty(&summary)? + "\n")?;
    run.finish(summary, &table)
}
