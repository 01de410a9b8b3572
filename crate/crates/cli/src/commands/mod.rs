mod conn;
mod intrinsic;
mod lexicon;
mod misc;
mod stance;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Parser;
use connotation::embeddings::Embeddings;
use connotation::encoder::data::{parse_definitions, parse_related, Definitions, Related};
use connotation::lexicon::{parse_verb_frames, Lexicon, VerbFrame};

use crate::args::{Cli, Command};
use crate::config::RunConfig;
use crate::run::{default_out, Manifest, Run, UsageError};

pub fn dispatch(cli: Cli, argv: Vec<String>, preset: Option<RunConfig>) -> Result<()> {
    if let Some(n) = cli.global.jobs {
        if n == 0 {
            return Err(UsageError("--jobs must be positive".into()).into());
        }
        // Fails only if a pool already exists, e.g. during replay.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if let Command::Replay(r) = &cli.command {
        return replay(&r.manifest, &cli);
    }
    let mut config = match (preset, &cli.global.config) {
        (Some(c), _) => c,
        (None, Some(path)) => RunConfig::load(path)?,
        (None, None) => RunConfig::default(),
    };
    match cli.global.seed.or(config.seed) {
        Some(s) => config.set_seed(s),
        None if cli.command.needs_seed() => {
            return Err(UsageError(format!("{} needs a seed: pass --seed or set `seed` in the config", cli.command.name())).into());
        }
        None => {}
    }
    apply_overrides(&cli.command, &mut config)?;
    config.validate()?;
    let out = cli.global.out.clone().unwrap_or_else(|| default_out(cli.command.name()));
    let mut run = Run::start(cli.command.name(), argv, out, cli.global.force, config)?;
    if let Some(c) = &cli.global.config {
        run.input(c);
    }
    match cli.command {
        Command::CompileLexicon(a) => lexicon::compile(run, &a),
        Command::LexiconStats(a) => lexicon::stats(run, &a),
        Command::Agreement(a) => lexicon::agreement(run, &a),
        Command::Synonyms(a) => lexicon::synonyms(run, &a),
        Command::Split(a) => conn::split(run, &a),
        Command::TrainConn(a) => conn::train(run, &a),
        Command::EvalConn(a) => conn::eval(run, &a),
        Command::ExportEmbeddings(a) => conn::export(run, &a),
        Command::KnnPurity(a) => intrinsic::knn_purity(run, &a),
        Command::GenNeutrals(a) => stance::gen_neutrals(run, &a),
        Command::TrainStance(a) => stance::train(run, &a),
        Command::EvalStance(a) => stance::eval(run, &a),
        Command::Significance(a) => intrinsic::significance(run, &a),
        Command::GradCheck(_) => misc::grad_check(run),
        Command::Replay(_) => unreachable!("handled above"),
    }
}

/// Command-line flags that override run-configuration fields.
fn apply_overrides(cmd: &Command, cfg: &mut RunConfig) -> Result<()> {
    use crate::args::{ModeArg, VariantArg};
    use connotation::encoder::config::{Mode, Variant};
    match cmd {
        Command::TrainConn(a) => {
            if let Some(e) = a.epochs {
                cfg.model.epochs = e;
            }
            if let Some(m) = a.mode {
                cfg.model.mode = match m {
                    ModeArg::J => Mode::Joint,
                    ModeArg::S => Mode::Separate,
                };
            }
            if let Some(v) = a.variant {
                cfg.model.variant = match v {
                    VariantArg::Ce => Variant::Ce,
                    VariantArg::CeR => Variant::CeR,
                };
            }
        }
        Command::TrainStance(a) => {
            if let Some(e) = a.epochs {
                cfg.stance.epochs = e;
            }
            if let Some(s) = a.scenario {
                cfg.stance.scenario = stance::scenario(s);
            }
            if let Some(att) = a.attention {
                cfg.stance.attention = stance::attention(att);
            }
        }
        Command::EvalStance(a) => {
            if let Some(s) = a.scenario {
                cfg.stance.scenario = stance::scenario(s);
            }
        }
        Command::GenNeutrals(a) => {
            if let Some(r) = a.neutral_ratio {
                cfg.stance.neutral_ratio = r;
            }
        }
        Command::KnnPurity(a) => {
            if let Some(k) = a.k {
                cfg.purity.k = k;
            }
        }
        Command::Significance(a) => {
            if let Some(r) = a.rounds {
                cfg.significance.rounds = r;
            }
        }
        Command::GradCheck(a) => {
            if let Some(n) = a.instances {
                cfg.grad_check.instances = n;
            }
        }
        _ => {}
    }
    Ok(())
}

fn replay(manifest_path: &Path, cli: &Cli) -> Result<()> {
    let manifest = Manifest::load(manifest_path)?;
    let mut args = vec!["connote".to_string()];
    args.extend(manifest.argv.iter().cloned());
    let mut inner = Cli::try_parse_from(&args)
        .map_err(|e| UsageError(format!("{}: recorded arguments no longer parse: {e}", manifest_path.display())))?;
    if matches!(inner.command, Command::Replay(_)) {
        return Err(UsageError("a replay manifest cannot replay itself".into()).into());
    }
    let out = match &cli.global.out {
        Some(o) => o.clone(),
        None => manifest_path.parent().unwrap_or(Path::new(".")).join("replay"),
    };
    let out = std::path::absolute(&out)?;
    inner.global.out = Some(out);
    inner.global.force = cli.global.force;
    inner.global.seed = manifest.seed;
    if let Some(j) = cli.global.jobs {
        inner.global.jobs = Some(j);
    }
    std::env::set_current_dir(&manifest.cwd)
        .with_context(|| format!("changing to recorded working directory {}", manifest.cwd))?;
    dispatch(inner, manifest.argv, Some(manifest.config))
}

fn read_text(run: &mut Run, path: &Path) -> Result<String> {
    run.input(path);
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub(crate) fn load_lexicon(run: &mut Run, path: &Path) -> Result<Lexicon> {
    run.input(path);
    Ok(Lexicon::load(path)?)
}

pub(crate) fn load_verbs(run: &mut Run, path: Option<&PathBuf>) -> Result<Vec<VerbFrame>> {
    match path {
        Some(p) => {
            let text = read_text(run, p)?;
            Ok(parse_verb_frames(&text, p)?)
        }
        None => Ok(Vec::new()),
    }
}

pub(crate) fn load_embeddings(run: &mut Run, path: &Path) -> Result<Embeddings> {
    run.input(path);
    Ok(Embeddings::load(path)?)
}

pub(crate) fn load_definitions(run: &mut Run, path: &Path) -> Result<Definitions> {
    let text = read_text(run, path)?;
    Ok(parse_definitions(&text, path)?)
}

pub(crate) fn load_related(run: &mut Run, path: Option<&PathBuf>) -> Result<Related> {
    match path {
        Some(p) => {
            let text = read_text(run, p)?;
            Ok(parse_related(&text, p)?)
        }
        None => Ok(Related::new()),
    }
}

pub(crate) fn csv_lines<T>(header: &str, rows: &[T], f: impl Fn(&T) -> String) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&f(r));
        s.push('\n');
    }
    s
}
