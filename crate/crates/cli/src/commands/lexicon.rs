use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::Result;
use connotation::aspect::{Aspect, Polarity, Pos};
use connotation::lexicon::{agreement_metrics, class_distribution, compile_lexicon, RuleTable, Sources};
use connotation::synonyms::{divergence_report, parse_ppdb, parse_synsets, select_pairs};
use connotation::Error;
use serde_json::json;

use super::{csv_lines, load_lexicon, read_text};
use crate::args::{Agreement, CompileLexicon, LexiconIn, Synonyms};
use crate::run::Run;
use crate::table::{f3, render};

pub fn compile(mut run: Run, a: &CompileLexicon) -> Result<()> {
    let rules = match &a.rules {
        Some(p) => {
            run.input(p);
            RuleTable::from_path(p)?
        }
        None => RuleTable::default(),
    };
    for name in ["hgi.tsv", "dal.tsv", "cwn.tsv", "nrc.tsv"] {
        let p = a.sources.join(name);
        if p.exists() {
            run.input(&p);
        }
    }
    let sources = Sources::load_dir(&a.sources)?;
    if sources.is_empty() {
        anyhow::bail!("no source files found in {}", a.sources.display());
    }
    let (lexicon, report) = compile_lexicon(&sources, &rules)?;
    let path = run.written("lexicon.jsonl");
    lexicon.save(&path)?;
    let table = render(
        &["entries", "fully labeled", "GI senses", "conflicts", "unattached"],
        &[vec![
            report.entries.to_string(),
            report.fully_labeled.to_string(),
            report.hgi_senses.to_string(),
            report.conflicting_senses.to_string(),
            report.unattached_words.to_string(),
        ]],
    );
    run.finish(json!({ "report": report }), &table)
}

pub fn stats(mut run: Run, a: &LexiconIn) -> Result<()> {
    let lexicon = load_lexicon(&mut run, &a.lexicon)?;
    let dist = class_distribution(&lexicon)?;
    let rows: Vec<_> = dist.aspects.iter().collect();
    let csv = csv_lines("aspect,pct_positive,pct_negative,pct_neutral", &rows, |(asp, s)| {
        format!("{asp},{:.4},{:.4},{:.4}", s.positive, s.negative, s.neutral)
    });
    run.write("class_distribution.csv", csv)?;
    let mut table = render(
        &["aspect", "%+", "%-", "%0"],
        &rows.iter().map(|(asp, s)| vec![asp.to_string(), f3(s.positive), f3(s.negative), f3(s.neutral)]).collect::<Vec<_>>(),
    );
    table.push_str(&format!(
        "{} fully labeled; {:.1}% with an emotion, {:.2} emotions on average\n",
        dist.fully_labeled, dist.emotion_coverage, dist.mean_emotions
    ));
    run.finish(json!({ "distribution": dist }), &table)
}

struct AnnotationRow {
    word: String,
    pos: Pos,
    aspect: Aspect,
    labels: Vec<Polarity>,
}

fn parse_annotations(text: &str, path: &Path) -> Result<Vec<AnnotationRow>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::parse(path, i + 1, msg);
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 4 {
            return Err(bad(format!("expected 4 tab-separated fields, found {}", f.len())).into());
        }
        let pos = Pos::from_str(f[1]).map_err(|e| bad(e.to_string()))?;
        let aspect = Aspect::from_str(f[2]).map_err(|e| bad(e.to_string()))?;
        if aspect.is_emotion() || aspect.is_four_way() {
            return Err(bad(format!("agreement is defined for polar aspects, not {aspect}")).into());
        }
        let labels = f[3]
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<i64>()
                    .ok()
                    .and_then(Polarity::from_value)
                    .ok_or_else(|| bad(format!("label `{v}` is not -1, 0 or 1")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(AnnotationRow { word: f[0].trim().to_lowercase(), pos, aspect, labels });
    }
    Ok(out)
}

pub fn agreement(mut run: Run, a: &Agreement) -> Result<()> {
    let lexicon = load_lexicon(&mut run, &a.lexicon)?;
    let text = read_text(&mut run, &a.annotations)?;
    let rows = parse_annotations(&text, &a.annotations)?;
    let mut by_aspect: BTreeMap<Aspect, (Vec<Vec<Polarity>>, Vec<Polarity>)> = BTreeMap::new();
    let mut missing = 0usize;
    for r in rows {
        match lexicon.label(&r.word, r.pos, r.aspect).and_then(|l| l.polarity()) {
            Some(lab) => {
                let e = by_aspect.entry(r.aspect).or_default();
                e.0.push(r.labels);
                e.1.push(lab);
            }
            None => missing += 1,
        }
    }
    if missing > 0 {
        log::warn!("{missing} annotated words have no lexicon label and were left out");
    }
    let mut reports = BTreeMap::new();
    for (aspect, (ann, lex)) in &by_aspect {
        reports.insert(*aspect, agreement_metrics(ann, lex)?);
    }
    if reports.is_empty() {
        anyhow::bail!("no annotated word has a lexicon label");
    }
    let rows: Vec<_> = reports.iter().collect();
    let csv = csv_lines(
        "aspect,words,fleiss_kappa,mean_pairwise_pct,lexicon_pct,lexicon_nc_pct,cohen_kappa,excluded_no_majority",
        &rows,
        |(asp, r)| {
            format!(
                "{asp},{},{:.6},{:.4},{:.4},{:.4},{:.6},{}",
                r.words, r.fleiss_kappa, r.mean_pairwise_pct, r.lexicon_pct, r.lexicon_nc_pct, r.cohen_kappa, r.excluded_no_majority
            )
        },
    );
    run.write("agreement.csv", csv)?;
    let table = render(
        &["aspect", "words", "fleiss", "%pair", "%lex", "%lex NC", "cohen"],
        &rows
            .iter()
            .map(|(asp, r)| {
                vec![
                    asp.to_string(),
                    r.words.to_string(),
                    f3(r.fleiss_kappa),
                    f3(r.mean_pairwise_pct),
                    f3(r.lexicon_pct),
                    f3(r.lexicon_nc_pct),
                    f3(r.cohen_kappa),
                ]
            })
            .collect::<Vec<_>>(),
    );
    run.finish(json!({ "aspects": reports, "missing_lexicon_label": missing }), &table)
}

pub fn synonyms(mut run: Run, a: &Synonyms) -> Result<()> {
    let lexicon = load_lexicon(&mut run, &a.lexicon)?;
    let ppdb_text = read_text(&mut run, &a.ppdb)?;
    let paraphrases = parse_ppdb(&ppdb_text, &a.ppdb)?;
    let syn_text = read_text(&mut run, &a.synsets)?;
    let synsets = parse_synsets(&syn_text, &a.synsets)?;
    let pairs = select_pairs(&paraphrases, &synsets, &lexicon);
    let tsv = csv_lines("word_a\tword_b\tpos", &pairs, |p| format!("{}\t{}\t{}", p.word_a, p.word_b, p.pos));
    run.write("pairs.tsv", tsv)?;
    let report = divergence_report(&pairs, &lexicon)?;
    run.write("divergence.csv", report.to_csv())?;
    let summary = json!({
        "pairs": report.pairs,
        "pct_any_different": report.pct_any_different(),
        "mean_pct_neutral_among_differences": report.mean_pct_neutral_among_differences(),
    });
    run.finish(summary, &report.to_table())
}
