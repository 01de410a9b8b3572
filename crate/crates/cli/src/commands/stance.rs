use std::io::BufReader;
use std::path::Path;

use anyhow::{Context, Result};
use connotation::embeddings::Embeddings;
use connotation::encoder::data::build_input;
use connotation::encoder::train::{export_embeddings, TrainedModel};
use connotation::numerics::Checkpoint;
use connotation::stance::bowv::bowv_predict;
use connotation::stance::data::{
    add_neutrals, build_splits, dataset_stats, load_stance, read_examples, stats_csv, truncate, write_examples,
    FallbackTagger, Scenario,
};
use connotation::stance::evaluate::{evaluate_stance, prediction_rows, scores_csv};
use connotation::stance::model::{AttentionSpace, Featurizer};
use connotation::stance::train::{from_checkpoint, log_csv, predict_all, to_checkpoint, train_bic};
use connotation::stance::{AttentionKind, StanceConfig, StanceSplits};
use connotation::encoder::evaluate::write_jsonl;
use serde_json::json;

use super::{load_definitions, load_embeddings, load_lexicon, load_related};
use crate::args::{AttentionArg, ConnSource, EvalStance, GenNeutrals, ScenarioArg, TrainStance};
use crate::run::{Run, UsageError};
use crate::table::{f4, render};

pub fn scenario(s: ScenarioArg) -> Scenario {
    match s {
        ScenarioArg::AllData => Scenario::AllData,
        ScenarioArg::TruncTrain => Scenario::TruncTrain,
        ScenarioArg::TruncAll => Scenario::TruncAll,
    }
}

pub fn attention(a: AttentionArg) -> AttentionKind {
    match a {
        AttentionArg::None => AttentionKind::None,
        AttentionArg::W => AttentionKind::Word,
        AttentionArg::C => AttentionKind::Connotation,
        AttentionArg::R => AttentionKind::Random,
    }
}

const SPLITS: [&str; 3] = ["train", "dev", "test"];

pub fn gen_neutrals(mut run: Run, a: &GenNeutrals) -> Result<()> {
    let cfg = run.config.stance.clone();
    let tagger = match &a.lexicon {
        Some(p) => FallbackTagger::from_lexicon(&load_lexicon(&mut run, p)?),
        None => FallbackTagger::default(),
    };
    run.input(&a.stance);
    let (examples, report) = load_stance(&a.stance, &tagger)?;
    let mut splits = build_splits(&examples, cfg.seed)?;
    add_neutrals(&mut splits, cfg.neutral_ratio, cfg.seed)?;
    let mut body = Vec::new();
    for (name, exs) in splits.named() {
        run.write_with(&format!("{name}.jsonl"), |w| Ok(write_examples(exs, w)?))?;
        let stats = dataset_stats(exs);
        run.write(&format!("stats_{name}.csv"), stats_csv(&stats))?;
        let o = stats.last().expect("overall row");
        body.push(vec![name.to_string(), o.examples.to_string(), o.con.to_string(), o.pro.to_string(), o.neutral.to_string()]);
    }
    let table = render(&["split", "examples", "con", "pro", "neutral"], &body);
    let summary = json!({
        "load": report,
        "neutral_ratio": cfg.neutral_ratio,
        "sizes": splits.named().iter().map(|(n, e)| (n.to_string(), e.len())).collect::<std::collections::BTreeMap<_, _>>(),
    });
    run.finish(summary, &table)
}

fn read_splits(run: &mut Run, dir: &Path) -> Result<StanceSplits> {
    let mut out = StanceSplits::default();
    for (name, slot) in SPLITS.iter().zip([&mut out.train, &mut out.dev, &mut out.test]) {
        let path = dir.join(format!("{name}.jsonl"));
        run.input(&path);
        let f = std::fs::File::open(&path).with_context(|| format!("opening {}", path.display()))?;
        *slot = read_examples(BufReader::new(f), &path)?;
    }
    Ok(out)
}

/// Connotation vectors for every noun/adjective/verb token in `splits`.
fn encode_tokens(run: &mut Run, conn: &ConnSource, ck_path: &Path, words: &Embeddings, splits: &StanceSplits) -> Result<Embeddings> {
    let defs_path = conn
        .definitions
        .as_ref()
        .ok_or_else(|| UsageError("--conn-checkpoint needs --definitions".into()))?;
    run.input(ck_path);
    let (model, mcfg) = TrainedModel::from_checkpoint(&Checkpoint::load(ck_path)?)?;
    let defs = load_definitions(run, defs_path)?;
    let related = load_related(run, conn.related.as_ref())?;
    let mut keys = std::collections::BTreeSet::new();
    for (_, exs) in splits.named() {
        for e in exs {
            for t in &e.tokens {
                if let Some(p) = t.pos() {
                    keys.insert((t.word.clone(), p));
                }
            }
        }
    }
    let inputs: Vec<_> = keys
        .iter()
        .filter_map(|(w, p)| build_input(w, *p, &defs, &related, words, &mcfg))
        .collect();
    log::info!("encoded {} of {} attention keys from definitions", inputs.len(), keys.len());
    Ok(export_embeddings(&model, &inputs)?)
}

fn attention_space(
    run: &mut Run,
    cfg: &StanceConfig,
    conn: &ConnSource,
    words: &Embeddings,
    splits: &StanceSplits,
) -> Result<Option<AttentionSpace>> {
    Ok(match cfg.attention {
        AttentionKind::None => None,
        AttentionKind::Word => Some(AttentionSpace::Words(words.clone())),
        AttentionKind::Random => Some(AttentionSpace::Random { dim: cfg.random_dim, seed: cfg.seed }),
        AttentionKind::Connotation => match (&conn.conn_embeddings, &conn.conn_checkpoint) {
            (Some(p), None) => Some(AttentionSpace::Keyed(load_embeddings(run, p)?)),
            (None, Some(ck)) => Some(AttentionSpace::Keyed(encode_tokens(run, conn, ck, words, splits)?)),
            _ => {
                return Err(UsageError("attention c needs exactly one of --conn-embeddings or --conn-checkpoint".into()).into());
            }
        },
    })
}

fn truncated(cfg: &StanceConfig, splits: &StanceSplits) -> StanceSplits {
    truncate(splits, cfg.scenario, cfg.train_cap, cfg.eval_cap, cfg.seed)
}

pub fn train(mut run: Run, a: &TrainStance) -> Result<()> {
    let words = load_embeddings(&mut run, &a.embeddings)?;
    let mut cfg = run.config.stance.clone();
    if cfg.word_dim != words.dim() {
        log::info!("word_dim follows the embeddings file: {}", words.dim());
        cfg.word_dim = words.dim();
    }
    let splits = truncated(&cfg, &read_splits(&mut run, &a.data)?);
    let space = attention_space(&mut run, &cfg, &a.conn, &words, &splits)?;
    let outcome = train_bic(&cfg, &words, space.as_ref(), &splits.train, &splits.dev)?;
    let path = run.written("model.ckpt");
    to_checkpoint(&outcome.model, &cfg).save(&path)?;
    run.write("train_log.csv", log_csv(&outcome.log))?;
    let best_dev = outcome.log.iter().map(|l| l.dev_macro_f1).fold(f64::NEG_INFINITY, f64::max);
    let name = cfg.attention.model_name();
    let table = render(
        &["model", "scenario", "train", "dev", "best epoch", "best dev F1"],
        &[vec![
            name.to_string(),
            cfg.scenario.to_string(),
            splits.train.len().to_string(),
            splits.dev.len().to_string(),
            outcome.best_epoch.to_string(),
            if outcome.log.is_empty() { "-".into() } else { f4(best_dev) },
        ]],
    );
    let summary = json!({
        "model": name,
        "scenario": cfg.scenario,
        "train_examples": splits.train.len(),
        "dev_examples": splits.dev.len(),
        "best_epoch": outcome.best_epoch,
        "best_dev_macro_f1": (!outcome.log.is_empty()).then_some(best_dev),
    });
    run.finish(summary, &table)
}

pub fn eval(mut run: Run, a: &EvalStance) -> Result<()> {
    let all = read_splits(&mut run, &a.data)?;
    let (name, scenario, test, preds) = match &a.checkpoint {
        Some(ck_path) => {
            run.input(ck_path);
            let (model, cfg) = from_checkpoint(&Checkpoint::load(ck_path)?)?;
            let emb_path = a.embeddings.as_ref().ok_or_else(|| UsageError("--embeddings is required".into()))?;
            let words = load_embeddings(&mut run, emb_path)?;
            let splits = truncated(&cfg, &all);
            let space = attention_space(&mut run, &cfg, &a.conn, &words, &splits)?;
            let feats = Featurizer {
                words: &words,
                attention: space.as_ref(),
                max_text_tokens: cfg.max_text_tokens,
            };
            let preds = predict_all(&model, &feats, &splits.test)?;
            (cfg.attention.model_name(), cfg.scenario, splits.test, preds)
        }
        None => {
            let cfg = &run.config.stance;
            let splits = truncated(cfg, &all);
            let preds = bowv_predict(&splits.train, &splits.test)?;
            ("BoWV", cfg.scenario, splits.test, preds)
        }
    };
    if test.is_empty() {
        anyhow::bail!("the test split is empty");
    }
    let scores = evaluate_stance(&test, &preds)?;
    run.write_with("predictions.jsonl", |w| Ok(write_jsonl(&prediction_rows(&test, &preds), w)?))?;
    run.write("scores.csv", scores_csv(&scores))?;
    let mut body = vec![vec!["Overall".to_string(), test.len().to_string(), f4(scores.overall)]];
    body.extend(scores.per_topic.iter().map(|(t, f)| vec![t.clone(), scores.counts[t].to_string(), f4(*f)]));
    let table = render(&["topic", "n", "macro F1"], &body);
    run.finish(json!({ "model": name, "scenario": scenario, "scores": scores }), &table)
}
