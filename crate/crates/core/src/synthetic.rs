//! Seeded synthetic corpora with planted structure, used by tests, the
//! acceptance suite and smoke runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::aspect::{Aspect, EmotionSet, Label, Polarity, Pos};
use crate::embeddings::Embeddings;
use crate::encoder::data::{EncoderInput, Example};
use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, LexiconEntry, Source};
use crate::eval::space::format_key;
use crate::numerics::rng::{substream, Rng};
use crate::stance::data::{StanceExample, StanceLabel, StanceRecord, Token};

fn gaussian_vec(rng: &mut Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-1.0..1.0) * scale).collect()
}

/// Number of latent classes in [`planted_labels`].
pub const LATENT_CLASSES: usize = 4;

/// Label of every aspect as a function of a latent class in `0..4`: the
/// class itself for power/agency, classes 2 and 3 share positive polarity.
pub fn planted_labels(class: usize, pos: Pos) -> BTreeMap<Aspect, Label> {
    let pol = Polarity::from_class_index(class.min(2)).expect("class index");
    let mut out = BTreeMap::new();
    for a in Aspect::for_pos(pos) {
        let l = if a.is_emotion() {
            let names: &[&str] = match class {
                0 => &["anger", "fear", "sadness", "disgust"],
                1 => &[],
                _ => &["joy", "trust", "anticipation", "surprise"],
            };
            Label::Emotions(EmotionSet::from_names(names.iter().copied()).expect("known names"))
        } else if a.is_four_way() {
            Label::FourWay(class as u8)
        } else {
            Label::Polar(pol)
        };
        out.insert(*a, l);
    }
    out
}

/// `n` words whose definition tokens, related words and labels all follow a
/// latent class. Every fifth word is a verb.
pub fn planted_lexicon(n: usize, d: usize, seed: u64) -> Vec<Example> {
    let mut rng = substream(seed, "planted-lexicon");
    let per_class = 6;
    let vocab: Vec<Vec<Vec<f64>>> = (0..LATENT_CLASSES).map(|_| (0..per_class).map(|_| gaussian_vec(&mut rng, d, 1.0)).collect()).collect();
    let noise: Vec<Vec<f64>> = (0..10).map(|_| gaussian_vec(&mut rng, d, 1.0)).collect();
    (0..n)
        .map(|i| {
            let class = i % LATENT_CLASSES;
            let pos = match i % 5 {
                4 => Pos::Verb,
                3 => Pos::Adjective,
                _ => Pos::Noun,
            };
            let mut tokens: Vec<Vec<f64>> = (0..4).map(|_| vocab[class].choose(&mut rng).expect("vocab").clone()).collect();
            tokens.extend((0..2).map(|_| noise.choose(&mut rng).expect("noise").clone()));
            tokens.shuffle(&mut rng);
            let related = (0..3).map(|_| vocab[class].choose(&mut rng).expect("vocab").clone()).collect();
            let pretrained = (i % 7 != 0).then(|| gaussian_vec(&mut rng, d, 1.0));
            Example {
                input: EncoderInput { word: format!("word{i:03}"), pos, tokens, related, pretrained },
                labels: planted_labels(class, pos),
            }
        })
        .collect()
}

const TOPIC_NAMES: [&str; 6] = [
    "gun control",
    "death penalty",
    "school prayer",
    "animal testing",
    "space program",
    "minimum wage",
];

/// A stance corpus whose label is the polarity of the one stance adjective
/// in each text, with word vectors and connotation embeddings.
pub struct PlantedStance {
    pub examples: Vec<StanceExample>,
    /// Pretrained-style vectors for every word, unrelated to polarity.
    pub words: Embeddings,
    /// `word|pos` vectors in which stance adjectives cluster by polarity.
    pub connotation: Embeddings,
}

/// `per_topic` pro/con examples for each of `topics` topics. Each text has
/// two topic nouns, one of `stance_words` adjectives (even index = pro) and
/// two filler adverbs, shuffled. Authors write ten posts each.
pub fn planted_stance(topics: usize, per_topic: usize, dim: usize, stance_words: usize, seed: u64) -> PlantedStance {
    assert!(topics >= 1 && topics <= TOPIC_NAMES.len() && stance_words >= 2);
    let mut rng = substream(seed, "planted-stance");
    let mut words = Embeddings::new(dim);
    let mut connotation = Embeddings::new(dim);
    let mut add = |rng: &mut Rng, w: &str| {
        if !words.contains(w) {
            words.insert(w, &gaussian_vec(rng, dim, 1.0)).expect("finite");
        }
    };
    let center = gaussian_vec(&mut rng, dim, 1.0);
    let adjectives: Vec<String> = (0..stance_words).map(|j| format!("adj{j}")).collect();
    for (j, a) in adjectives.iter().enumerate() {
        add(&mut rng, a);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let v: Vec<f64> = center
            .iter()
            .zip(gaussian_vec(&mut rng, dim, 0.1))
            .map(|(c, n)| sign * c + n)
            .collect();
        connotation.insert(&format_key(a, Pos::Adjective), &v).expect("finite");
    }
    let fillers: Vec<String> = (0..6).map(|k| format!("filler{k}")).collect();
    fillers.iter().for_each(|f| add(&mut rng, f));
    let mut examples = Vec::with_capacity(topics * per_topic);
    for (t, name) in TOPIC_NAMES.iter().enumerate().take(topics) {
        let topic_tokens = crate::text::content_tokens(name);
        topic_tokens.iter().for_each(|w| add(&mut rng, w));
        let nouns: Vec<String> = (0..4).map(|k| format!("t{t}n{k}")).collect();
        nouns.iter().for_each(|n| add(&mut rng, n));
        for i in 0..per_topic {
            let j = rng.gen_range(0..stance_words);
            let mut tokens = vec![
                Token { word: nouns[rng.gen_range(0..4)].clone(), tag: "NN".into() },
                Token { word: nouns[rng.gen_range(0..4)].clone(), tag: "NN".into() },
                Token { word: adjectives[j].clone(), tag: "JJ".into() },
                Token { word: fillers[rng.gen_range(0..6)].clone(), tag: "RB".into() },
                Token { word: fillers[rng.gen_range(0..6)].clone(), tag: "RB".into() },
            ];
            tokens.shuffle(&mut rng);
            examples.push(StanceExample {
                topic: name.to_string(),
                topic_tokens: topic_tokens.clone(),
                tokens,
                label: if j % 2 == 0 { StanceLabel::Pro } else { StanceLabel::Con },
                author: format!("u{t}_{}", i / 10),
            });
        }
    }
    PlantedStance { examples, words, connotation }
}

/// Paths written by [`write_planted_files`].
#[derive(Debug, Clone)]
pub struct PlantedFiles {
    pub lexicon: PathBuf,
    pub verbs: PathBuf,
    pub definitions: PathBuf,
    pub related: PathBuf,
    pub embeddings: PathBuf,
    pub stance: PathBuf,
    pub stance_words: PathBuf,
    pub connotation: PathBuf,
}

/// Writes a planted lexicon of `n` words (every fifth a verb) with
/// definitions, related words and `dim`-dimensional word vectors, plus the
/// corpus of [`planted_stance`] with 3 topics of `per_topic` examples, in
/// the on-disk formats the command-line tool reads.
pub fn write_planted_files(dir: &Path, n: usize, dim: usize, per_topic: usize, seed: u64) -> Result<PlantedFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut rng = substream(seed, "planted-files");
    let per_class = 6;
    let mut emb = Embeddings::new(dim);
    let class_words: Vec<Vec<String>> = (0..LATENT_CLASSES)
        .map(|c| (0..per_class).map(|j| format!("cls{c}w{j}")).collect())
        .collect();
    let noise: Vec<String> = (0..10).map(|k| format!("noise{k}")).collect();
    for w in class_words.iter().flatten().chain(&noise) {
        emb.insert(w, &gaussian_vec(&mut rng, dim, 1.0))?;
    }
    let mut lexicon = Lexicon::new();
    let (mut verbs, mut defs, mut related) = (String::new(), String::new(), String::new());
    for i in 0..n {
        let class = i % LATENT_CLASSES;
        let pos = match i % 5 {
            4 => Pos::Verb,
            3 => Pos::Adjective,
            _ => Pos::Noun,
        };
        let word = format!("word{i:04}");
        let mut tokens: Vec<&str> = (0..4).map(|_| class_words[class].choose(&mut rng).expect("vocab").as_str()).collect();
        tokens.extend((0..2).map(|_| noise.choose(&mut rng).expect("noise").as_str()));
        tokens.shuffle(&mut rng);
        defs.push_str(&format!("{word}\t{pos}\tsynthetic\t{}\n", tokens.join(" ")));
        let rel: Vec<&str> = (0..3).map(|_| class_words[class].choose(&mut rng).expect("vocab").as_str()).collect();
        related.push_str(&format!("{word}\t{pos}\t{}\n", rel.join(",")));
        if i % 7 != 0 {
            emb.insert(&word, &gaussian_vec(&mut rng, dim, 1.0))?;
        }
        let labels = planted_labels(class, pos);
        if pos == Pos::Verb {
            let items: Vec<String> = labels
                .iter()
                .map(|(a, l)| match l {
                    Label::Polar(p) => format!("{a}={}", p.value()),
                    Label::FourWay(c) => format!("{a}={c}"),
                    Label::Emotions(_) => unreachable!("verbs have no emotion aspect"),
                })
                .collect();
            verbs.push_str(&format!("{word}\t-\t{}\n", items.join(",")));
        } else {
            let mut e = LexiconEntry::new(word, pos);
            for (a, l) in labels {
                e = e.with_label(a, l, Source::Hgi);
            }
            lexicon.insert(e);
        }
    }
    let stance = planted_stance(3, per_topic, dim, 12, seed);
    let mut stance_lines = String::new();
    for ex in &stance.examples {
        let rec = StanceRecord {
            topic: ex.topic.clone(),
            text: ex.tokens.iter().map(|t| t.word.as_str()).collect::<Vec<_>>().join(" "),
            pos_tags: Some(ex.tokens.iter().map(|t| t.tag.clone()).collect()),
            label: ex.label,
            author: ex.author.clone(),
        };
        stance_lines.push_str(&serde_json::to_string(&rec)?);
        stance_lines.push('\n');
    }
    let files = PlantedFiles {
        lexicon: dir.join("lexicon.jsonl"),
        verbs: dir.join("verb_frames.tsv"),
        definitions: dir.join("definitions.tsv"),
        related: dir.join("related.tsv"),
        embeddings: dir.join("embeddings.txt"),
        stance: dir.join("stance.jsonl"),
        stance_words: dir.join("stance_words.txt"),
        connotation: dir.join("stance_connotation.txt"),
    };
    let write = |p: &Path, s: &str| std::fs::write(p, s).map_err(|e| Error::io(p, e));
    lexicon.save(&files.lexicon)?;
    write(&files.verbs, &verbs)?;
    write(&files.definitions, &defs)?;
    write(&files.related, &related)?;
    emb.save(&files.embeddings)?;
    write(&files.stance, &stance_lines)?;
    stance.words.save(&files.stance_words)?;
    stance.connotation.save(&files.connotation)?;
    Ok(files)
}
