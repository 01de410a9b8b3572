use std::collections::BTreeMap;

use anyhow::{Context, Result};
use connotation::embeddings::Embeddings;
use connotation::encoder::baselines::{lr_baseline, majority_baseline};
use connotation::encoder::config::ModelConfig;
use connotation::encoder::data::{
    build_examples, build_input, merge_verbs, parse_split, partition, split_dataset, write_split, Definitions, Example,
    InputReport, Related,
};
use connotation::encoder::evaluate::{prediction_rows, score, write_jsonl, AspectScores};
use connotation::encoder::train::{export_embeddings, log_csv, train as train_model, variant_name, TrainedModel};
use connotation::lexicon::Lexicon;
use connotation::numerics::Checkpoint;
use connotation::split::Split;
use serde_json::json;

use super::{load_definitions, load_embeddings, load_lexicon, load_related, load_verbs, read_text};
use crate::args::{EncoderData, EvalConn, ExportEmbeddings, SplitArgs, SplitName, TrainConn};
use crate::run::Run;
use crate::table::{f4, render};

struct Loaded {
    lexicon: Lexicon,
    verbs: Vec<connotation::lexicon::VerbFrame>,
    defs: Definitions,
    related: Related,
    emb: Embeddings,
}

fn load_data(run: &mut Run, d: &EncoderData) -> Result<Loaded> {
    let lexicon = load_lexicon(run, &d.lexicon)?;
    let verbs = load_verbs(run, d.verbs.as_ref())?;
    let defs = load_definitions(run, &d.definitions)?;
    let related = load_related(run, d.related.as_ref())?;
    let emb = load_embeddings(run, &d.embeddings)?;
    Ok(Loaded { lexicon, verbs, defs, related, emb })
}

fn examples(l: &Loaded, cfg: &ModelConfig) -> (Vec<Example>, InputReport) {
    let merged = merge_verbs(&l.lexicon, &l.verbs);
    build_examples(merged.iter(), &l.defs, &l.related, &l.emb, cfg)
}

fn split_counts(assignment: &BTreeMap<String, Split>) -> BTreeMap<&'static str, usize> {
    let mut c = BTreeMap::new();
    for s in assignment.values() {
        *c.entry(s.as_str()).or_insert(0) += 1;
    }
    c
}

pub fn split(mut run: Run, a: &SplitArgs) -> Result<()> {
    let lexicon = load_lexicon(&mut run, &a.lexicon)?;
    let verbs = load_verbs(&mut run, a.verbs.as_ref())?;
    let assignment = split_dataset(&lexicon, &verbs, run.seed());
    run.write_with("split.tsv", |w| Ok(write_split(&assignment, w)?))?;
    let counts = split_counts(&assignment);
    let table = render(
        &["split", "words"],
        &counts.iter().map(|(s, n)| vec![s.to_string(), n.to_string()]).collect::<Vec<_>>(),
    );
    run.finish(json!({ "words": assignment.len(), "counts": counts }), &table)
}

fn load_split(run: &mut Run, path: &std::path::Path) -> Result<BTreeMap<String, Split>> {
    let text = read_text(run, path)?;
    Ok(parse_split(&text, path)?)
}

fn scores_table(rows: &[(String, &AspectScores)]) -> (String, String) {
    let mut csv = String::from("system,aspect,n,macro_f1\n");
    let mut aspects: Vec<_> = rows.iter().flat_map(|(_, s)| s.per_aspect.keys().copied()).collect();
    aspects.sort();
    aspects.dedup();
    for (name, s) in rows {
        for (asp, f) in &s.per_aspect {
            csv.push_str(&format!("{name},{asp},{},{f:.6}\n", s.counts[asp]));
        }
        csv.push_str(&format!("{name},average,{},{:.6}\n", s.counts.values().sum::<usize>(), s.average()));
    }
    let mut header = vec!["aspect".to_string()];
    header.extend(rows.iter().map(|(n, _)| n.clone()));
    let mut body: Vec<Vec<String>> = aspects
        .iter()
        .map(|asp| {
            let mut r = vec![asp.to_string()];
            r.extend(rows.iter().map(|(_, s)| s.per_aspect.get(asp).map_or("-".into(), |f| f4(*f))));
            r
        })
        .collect();
    let mut avg = vec!["average".to_string()];
    avg.extend(rows.iter().map(|(_, s)| f4(s.average())));
    body.push(avg);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    (csv, render(&header, &body))
}

pub fn train(mut run: Run, a: &TrainConn) -> Result<()> {
    let cfg = run.config.model.clone();
    let data = load_data(&mut run, &a.data)?;
    let assignment = match &a.split {
        Some(p) => load_split(&mut run, p)?,
        None => split_dataset(&data.lexicon, &data.verbs, run.seed()),
    };
    let (examples, report) = examples(&data, &cfg);
    let [train, dev, _] = partition(examples, &assignment);
    log::info!("{} training and {} development examples", train.len(), dev.len());
    let outcome = train_model(&cfg, data.emb.dim(), &train, &dev)?;
    let ck = outcome.model.to_checkpoint(&cfg);
    let path = run.written("model.ckpt");
    ck.save(&path)?;
    run.write("train_log.csv", log_csv(&outcome.log))?;
    let last_dev = outcome.log.last().map(|l| l.dev_macro_f1);
    let best_dev = outcome.log.iter().map(|l| l.dev_macro_f1).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let table = render(
        &["model", "train", "dev", "epochs", "best dev F1"],
        &[vec![
            variant_name(&cfg),
            train.len().to_string(),
            dev.len().to_string(),
            outcome.log.len().to_string(),
            best_dev.map_or("-".into(), f4),
        ]],
    );
    let summary = json!({
        "model": variant_name(&cfg),
        "inputs": report,
        "train_examples": train.len(),
        "dev_examples": dev.len(),
        "best_epoch": outcome.best_epoch,
        "last_dev_macro_f1": last_dev,
        "best_dev_macro_f1": best_dev,
    });
    run.finish(summary, &table)
}

fn load_checkpoint(run: &mut Run, path: &std::path::Path) -> Result<(TrainedModel, ModelConfig)> {
    run.input(path);
    let ck = Checkpoint::load(path)?;
    TrainedModel::from_checkpoint(&ck).with_context(|| format!("loading {}", path.display()))
}

pub fn eval(mut run: Run, a: &EvalConn) -> Result<()> {
    let (model, mcfg) = load_checkpoint(&mut run, &a.checkpoint)?;
    let data = load_data(&mut run, &a.data)?;
    let assignment = load_split(&mut run, &a.split)?;
    let (examples, report) = examples(&data, &mcfg);
    let [train, dev, test] = partition(examples, &assignment);
    let target = match a.on {
        SplitName::Train => &train,
        SplitName::Dev => &dev,
        SplitName::Test => &test,
    };
    if target.is_empty() {
        anyhow::bail!("no examples in the selected split");
    }
    let preds = model.predict_all(target, mcfg.emotion_threshold)?;
    let name = variant_name(&mcfg);
    run.write_with("predictions.jsonl", |w| Ok(write_jsonl(&prediction_rows(target, &preds), w)?))?;
    let mut systems = vec![(name.clone(), score(target, &preds))];
    let mut lr_report = None;
    if a.baselines {
        let maj = majority_baseline(&train, target);
        run.write_with("predictions_maj.jsonl", |w| Ok(write_jsonl(&prediction_rows(target, &maj), w)?))?;
        systems.push(("Maj".into(), score(target, &maj)));
        let (lr, rep) = lr_baseline(&train, target, data.emb.dim());
        run.write_with("predictions_lr.jsonl", |w| Ok(write_jsonl(&prediction_rows(target, &lr), w)?))?;
        systems.push(("LR".into(), score(target, &lr)));
        lr_report = Some(rep);
    }
    let refs: Vec<(String, &AspectScores)> = systems.iter().map(|(n, s)| (n.clone(), s)).collect();
    let (csv, table) = scores_table(&refs);
    run.write("scores.csv", csv)?;
    let summary = json!({
        "split": format!("{:?}", a.on).to_lowercase(),
        "inputs": report,
        "systems": systems.iter().map(|(n, s)| (n.clone(), json!({ "average": s.average(), "per_aspect": s.per_aspect }))).collect::<BTreeMap<_, _>>(),
        "lr_baseline": lr_report,
    });
    run.finish(summary, &table)
}

pub fn export(mut run: Run, a: &ExportEmbeddings) -> Result<()> {
    let (model, mcfg) = load_checkpoint(&mut run, &a.checkpoint)?;
    let data = load_data(&mut run, &a.data)?;
    let merged = merge_verbs(&data.lexicon, &data.verbs);
    let mut skipped = 0usize;
    let inputs: Vec<_> = merged
        .iter()
        .filter_map(|e| {
            let i = build_input(&e.word, e.pos, &data.defs, &data.related, &data.emb, &mcfg);
            skipped += usize::from(i.is_none());
            i
        })
        .collect();
    if skipped > 0 {
        log::warn!("{skipped} words have no usable definition tokens and were not exported");
    }
    let table_emb = export_embeddings(&model, &inputs)?;
    let path = run.written("connotation.txt");
    table_emb.save(&path)?;
    let table = render(
        &["exported", "skipped", "dim"],
        &[vec![table_emb.len().to_string(), skipped.to_string(), table_emb.dim().to_string()]],
    );
    run.finish(json!({ "exported": table_emb.len(), "skipped": skipped, "dim": table_emb.dim() }), &table)
}
