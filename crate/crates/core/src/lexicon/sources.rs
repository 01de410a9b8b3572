//! Normalized source-lexicon files.
//!
//! All sources are UTF-8, tab separated, one record per line. Blank lines
//! and lines starting with `#` are skipped.
//!
//! | file      | columns                                 |
//! |-----------|-----------------------------------------|
//! | `hgi.tsv` | `word  sense  pos  cat1,cat2,...`       |
//! | `dal.tsv` | `word  imagery`                         |
//! | `cwn.tsv` | `word  pos  score` (score in `[0, 1]`)  |
//! | `nrc.tsv` | `word  emotion  0|1`                    |

use std::path::{Path, PathBuf};

use crate::aspect::Pos;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct HgiRecord {
    pub word: String,
    pub sense: String,
    /// `None` for parts of speech outside noun/adjective/verb.
    pub pos: Option<Pos>,
    pub categories: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DalRecord {
    pub word: String,
    pub imagery: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CwnRecord {
    pub word: String,
    pub pos: Option<Pos>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NrcRecord {
    pub word: String,
    /// Raw emotion column; sentiment rows (`positive`/`negative`) are kept
    /// here and ignored by the compiler.
    pub emotion: String,
    pub flag: bool,
}

/// Parsed contents of every available source file.
#[derive(Debug, Clone, Default)]
pub struct Sources {
    pub hgi: Vec<HgiRecord>,
    pub dal: Vec<DalRecord>,
    pub cwn: Vec<CwnRecord>,
    pub nrc: Vec<NrcRecord>,
}

impl Sources {
    /// Loads `hgi.tsv`, `dal.tsv`, `cwn.tsv` and `nrc.tsv` from `dir`;
    /// missing files are treated as empty sources.
    pub fn load_dir(dir: &Path) -> Result<Sources> {
        let read = |name: &str| -> Result<Option<(PathBuf, String)>> {
            let path = dir.join(name);
            if !path.exists() {
                return Ok(None);
            }
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            Ok(Some((path, text)))
        };
        let mut sources = Sources::default();
        if let Some((p, t)) = read("hgi.tsv")? {
            sources.hgi = parse_hgi(&t, &p)?;
        }
        if let Some((p, t)) = read("dal.tsv")? {
            sources.dal = parse_dal(&t, &p)?;
        }
        if let Some((p, t)) = read("cwn.tsv")? {
            sources.cwn = parse_cwn(&t, &p)?;
        }
        if let Some((p, t)) = read("nrc.tsv")? {
            sources.nrc = parse_nrc(&t, &p)?;
        }
        Ok(sources)
    }

    pub fn is_empty(&self) -> bool {
        self.hgi.is_empty() && self.dal.is_empty() && self.cwn.is_empty() && self.nrc.is_empty()
    }
}

/// Iterates `(line_number, fields)` over data lines of a TSV text.
pub(crate) fn tsv_records<'a>(
    text: &'a str,
    path: &'a Path,
    columns: usize,
) -> impl Iterator<Item = Result<(usize, Vec<&'a str>)>> + 'a {
    text.lines().enumerate().filter_map(move |(i, line)| {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            return None;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != columns {
            return Some(Err(Error::parse(
                path,
                i + 1,
                format!("expected {columns} tab-separated fields, found {}", fields.len()),
            )));
        }
        Some(Ok((i + 1, fields)))
    })
}

pub(crate) fn normalize_word(w: &str) -> String {
    w.trim().to_lowercase()
}

fn parse_finite(s: &str, path: &Path, line: usize, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::parse(path, line, format!("{what} `{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(path, line, format!("{what} is not finite")));
    }
    Ok(v)
}

fn nonempty_word(s: &str, path: &Path, line: usize) -> Result<String> {
    let w = normalize_word(s);
    if w.is_empty() {
        return Err(Error::parse(path, line, "empty word"));
    }
    Ok(w)
}

pub fn parse_hgi(text: &str, path: &Path) -> Result<Vec<HgiRecord>> {
    tsv_records(text, path, 4)
        .map(|r| {
            let (line, f) = r?;
            Ok(HgiRecord {
                word: nonempty_word(f[0], path, line)?,
                sense: f[1].trim().to_string(),
                pos: Pos::parse_loose(f[2]),
                categories: f[3]
                    .split(',')
                    .map(str::trim)
                    .filter(|c| !c.is_empty())
                    .map(String::from)
                    .collect(),
            })
        })
        .collect()
}

pub fn parse_dal(text: &str, path: &Path) -> Result<Vec<DalRecord>> {
    tsv_records(text, path, 2)
        .map(|r| {
            let (line, f) = r?;
            Ok(DalRecord {
                word: nonempty_word(f[0], path, line)?,
                imagery: parse_finite(f[1], path, line, "imagery score")?,
            })
        })
        .collect()
}

pub fn parse_cwn(text: &str, path: &Path) -> Result<Vec<CwnRecord>> {
    tsv_records(text, path, 3)
        .map(|r| {
            let (line, f) = r?;
            let score = parse_finite(f[2], path, line, "polarity score")?;
            if !(0.0..=1.0).contains(&score) {
                return Err(Error::parse(path, line, format!("score {score} outside [0, 1]")));
            }
            Ok(CwnRecord {
                word: nonempty_word(f[0], path, line)?,
                pos: Pos::parse_loose(f[1]),
                score,
            })
        })
        .collect()
}

pub fn parse_nrc(text: &str, path: &Path) -> Result<Vec<NrcRecord>> {
    tsv_records(text, path, 3)
        .map(|r| {
            let (line, f) = r?;
            let flag = match f[2].trim() {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::parse(path, line, format!("flag `{other}` is not 0 or 1")))
                }
            };
            Ok(NrcRecord {
                word: nonempty_word(f[0], path, line)?,
                emotion: f[1].trim().to_ascii_lowercase(),
                flag,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("fixture.tsv")
    }

    #[test]
    fn parses_hgi_rows() {
        let recs = parse_hgi("# header\nAttorney\t1\tnoun\tPowAuth, Positiv\n\n", p()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].word, "attorney");
        assert_eq!(recs[0].pos, Some(Pos::Noun));
        assert_eq!(recs[0].categories, vec!["PowAuth", "Positiv"]);
    }

    #[test]
    fn reports_file_and_line() {
        let err = parse_dal("rocky\t3.0\ntradition\tabc\n", p()).unwrap_err();
        assert_eq!(err.to_string(), "fixture.tsv:2: imagery score `abc` is not a number");
        let err = parse_cwn("song\tnoun\n", p()).unwrap_err();
        assert!(err.to_string().starts_with("fixture.tsv:1:"));
        assert!(parse_cwn("song\tnoun\t1.5\n", p()).is_err());
        assert!(parse_nrc("snake\tfear\t2\n", p()).is_err());
        assert!(parse_dal("rocky\tinf\n", p()).is_err());
    }
}
