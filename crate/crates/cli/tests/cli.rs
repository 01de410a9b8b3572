use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use connotation::synthetic::{write_planted_files, PlantedFiles};

fn connote(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_connote"))
        .args(args)
        .env_remove("CONNOTE_OUT")
        .output()
        .expect("spawn connote")
}

fn ok(args: &[&str]) -> Output {
    let out = connote(args);
    assert!(
        out.status.success(),
        "connote {} failed:\n{}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const CONFIG: &str = r#"
[model]
hidden = 4
epochs = 4
batch_size = 16
lr = 0.01
dropout = 0.1

[stance]
hidden = 8
epochs = 3
batch_size = 16
lr = 0.01
random_dim = 8

[purity]
k = 5

[significance]
rounds = 200
"#;

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
    files: PlantedFiles,
    config: PathBuf,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let files = write_planted_files(&root.join("data"), 80, 8, 40, 5).unwrap();
    let config = root.join("run.toml");
    fs::write(&config, CONFIG).unwrap();
    Fixture { _dir: dir, root, files, config }
}

fn encoder_args<'a>(f: &'a PlantedFiles) -> Vec<&'a str> {
    vec![
        "--lexicon",
        s(&f.lexicon),
        "--verbs",
        s(&f.verbs),
        "--definitions",
        s(&f.definitions),
        "--related",
        s(&f.related),
        "--embeddings",
        s(&f.embeddings),
    ]
}

#[test]
fn full_pipeline_runs_and_replays() {
    let fx = fixture();
    let out = |n: &str| fx.root.join("runs").join(n);
    let cfg = s(&fx.config);
    let f = &fx.files;

    let split = out("split");
    ok(&["split", "--lexicon", s(&f.lexicon), "--verbs", s(&f.verbs), "--seed", "3", "--out", s(&split)]);
    let split_tsv = split.join("split.tsv");
    assert_eq!(fs::read_to_string(&split_tsv).unwrap().lines().count(), 80);

    let train = out("train-conn");
    let mut args = vec!["train-conn", "--config", cfg, "--seed", "3", "--out", s(&train), "--split", s(&split_tsv)];
    args.extend(encoder_args(f));
    ok(&args);
    let ckpt = train.join("model.ckpt");
    assert!(ckpt.exists());
    assert_eq!(fs::read_to_string(train.join("train_log.csv")).unwrap().lines().count(), 5);

    let eval = out("eval-conn");
    let mut args = vec!["eval-conn", "--out", s(&eval), "--checkpoint", s(&ckpt), "--split", s(&split_tsv), "--baselines"];
    args.extend(encoder_args(f));
    let o = ok(&args);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("Maj") && stdout.contains("LR"), "{stdout}");
    let scores = fs::read_to_string(eval.join("scores.csv")).unwrap();
    assert!(scores.starts_with("system,aspect,n,macro_f1\n"));

    let export = out("export");
    let mut args = vec!["export-embeddings", "--out", s(&export), "--checkpoint", s(&ckpt)];
    args.extend(encoder_args(f));
    ok(&args);
    let conn = export.join("connotation.txt");
    assert_eq!(fs::read_to_string(&conn).unwrap().lines().filter(|l| l.contains('|')).count(), 80);

    let knn = out("knn");
    ok(&[
        "knn-purity", "--config", cfg, "--out", s(&knn), "--connotation", s(&conn), "--pretrained", s(&f.embeddings),
        "--lexicon", s(&f.lexicon), "--query", "word0001|noun",
    ]);
    assert!(fs::read_to_string(knn.join("purity.csv")).unwrap().contains(",C,"));
    assert!(fs::read_to_string(knn.join("neighbors.csv")).unwrap().lines().count() > 1);

    let neutrals = out("gen-neutrals");
    ok(&["gen-neutrals", "--seed", "3", "--out", s(&neutrals), "--stance", s(&f.stance)]);
    for split in ["train", "dev", "test"] {
        assert!(neutrals.join(format!("{split}.jsonl")).exists());
        assert!(neutrals.join(format!("stats_{split}.csv")).exists());
    }

    let stance = out("train-stance");
    ok(&[
        "train-stance", "--config", cfg, "--seed", "3", "--out", s(&stance), "--data", s(&neutrals), "--embeddings",
        s(&f.stance_words), "--attention", "c", "--conn-embeddings", s(&f.connotation),
    ]);
    let stance_ck = stance.join("model.ckpt");

    let ev_c = out("eval-stance-c");
    ok(&[
        "eval-stance", "--seed", "3", "--out", s(&ev_c), "--data", s(&neutrals), "--checkpoint", s(&stance_ck),
        "--embeddings", s(&f.stance_words), "--conn-embeddings", s(&f.connotation),
    ]);
    let ev_b = out("eval-stance-bowv");
    ok(&["eval-stance", "--seed", "3", "--out", s(&ev_b), "--data", s(&neutrals), "--bowv"]);

    let sig = out("significance");
    ok(&[
        "significance", "--config", cfg, "--seed", "3", "--out", s(&sig), "--a",
        s(&ev_c.join("predictions.jsonl")), "--b", s(&ev_b.join("predictions.jsonl")),
    ]);
    let sig_json: serde_json::Value = serde_json::from_str(&fs::read_to_string(sig.join("significance.json")).unwrap()).unwrap();
    let p = sig_json["rows"][0]["p"].as_f64().unwrap();
    assert!(p > 0.0 && p <= 1.0);

    let sig_conn = out("significance-conn");
    ok(&[
        "significance", "--config", cfg, "--seed", "3", "--out", s(&sig_conn), "--kind", "conn", "--a",
        s(&eval.join("predictions.jsonl")), "--b", s(&eval.join("predictions_maj.jsonl")),
    ]);

    // Replaying a run reproduces its outputs byte for byte.
    for run in [&train, &ev_c, &sig] {
        let replay = run.join("replay");
        ok(&["replay", s(&run.join("manifest.json")), "--out", s(&replay)]);
        let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(run.join("manifest.json")).unwrap()).unwrap();
        for o in manifest["outputs"].as_array().unwrap() {
            let name = o["path"].as_str().unwrap();
            assert_eq!(fs::read(run.join(name)).unwrap(), fs::read(replay.join(name)).unwrap(), "{name} differs on replay");
        }
    }
}

#[test]
fn zero_epochs_still_writes_checkpoint() {
    let fx = fixture();
    let out = fx.root.join("zero");
    let mut args = vec!["train-conn", "--config", s(&fx.config), "--seed", "1", "--epochs", "0", "--out", s(&out)];
    args.extend(encoder_args(&fx.files));
    ok(&args);
    assert!(out.join("model.ckpt").exists());
}

#[test]
fn usage_errors_exit_with_two() {
    let fx = fixture();
    assert_eq!(connote(&["split", "--no-such-flag"]).status.code(), Some(2));
    let out = fx.root.join("s");
    let base = ["split", "--lexicon", s(&fx.files.lexicon), "--out", s(&out)];
    assert_eq!(connote(&base).status.code(), Some(2), "missing seed");
    let mut with_seed = base.to_vec();
    with_seed.extend(["--seed", "1"]);
    ok(&with_seed);
    assert_eq!(connote(&with_seed).status.code(), Some(2), "non-empty output dir");
    with_seed.push("--force");
    ok(&with_seed);

    let bad = fx.root.join("bad.toml");
    fs::write(&bad, "seed = 1\n[model]\nhiden = 3\n").unwrap();
    let o = connote(&["lexicon-stats", "--config", s(&bad), "--lexicon", s(&fx.files.lexicon), "--out", s(&fx.root.join("st"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.toml:3:1"));

    let broken = fx.root.join("broken.jsonl");
    fs::write(&broken, "{not json\n").unwrap();
    let o = connote(&["lexicon-stats", "--lexicon", s(&broken), "--out", s(&fx.root.join("st2"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("broken.jsonl:1"));
}

#[test]
fn grad_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gc");
    ok(&["grad-check", "--seed", "1", "--instances", "2", "--out", s(&out)]);
    let csv = fs::read_to_string(out.join("grad_check.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert!(!csv.contains(",false"));
}
