use std::path::Path;
use std::str::FromStr;

use connotation::aspect::{Aspect, EmotionSet, Label, Polarity, Pos};
use connotation::lexicon::{compile_lexicon, RuleTable, Sources};

fn fixture_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/rule_examples"))
}

fn expected() -> Vec<(Aspect, String, Pos, Label)> {
    let text = std::fs::read_to_string(fixture_dir().join("expected.tsv")).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            let aspect = Aspect::from_str(f[0]).unwrap();
            let label = if aspect.is_emotion() {
                Label::Emotions(EmotionSet::from_names(f[3].split(',')).unwrap())
            } else {
                Label::Polar(Polarity::from_value(f[3].parse().unwrap()).unwrap())
            };
            (aspect, f[1].to_string(), Pos::from_str(f[2]).unwrap(), label)
        })
        .collect()
}

#[test]
fn every_example_row_is_reproduced() {
    let start = std::time::Instant::now();
    let sources = Sources::load_dir(fixture_dir()).unwrap();
    let (lex, report) = compile_lexicon(&sources, &RuleTable::default()).unwrap();
    let rows = expected();
    assert_eq!(rows.len(), 12);
    for (aspect, word, pos, want) in rows {
        assert_eq!(lex.label(&word, pos, aspect), Some(want), "{word} {pos} {aspect}");
    }
    // the verb sense of `shock` is outside the noun/adjective lexicon
    assert_eq!(report.skipped_pos, 1);
    assert!(start.elapsed().as_secs_f64() < 1.0);
}
