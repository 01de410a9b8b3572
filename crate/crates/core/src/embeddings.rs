//! Word-vector tables in the plain text format `key v1 v2 ... vd`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Vectors stored as `f32` in one contiguous buffer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Embeddings {
    dim: usize,
    keys: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f32>,
}

impl Embeddings {
    pub fn new(dim: usize) -> Embeddings {
        Embeddings {
            dim,
            ..Default::default()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Adds or replaces the vector for `key`.
    pub fn insert(&mut self, key: &str, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::Shape(format!(
                "vector for `{key}` has {} values, table dimension is {}",
                v.len(),
                self.dim
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("vector for `{key}` is not finite")));
        }
        match self.index.get(key) {
            Some(&i) => {
                for (d, s) in self.data[i * self.dim..(i + 1) * self.dim].iter_mut().zip(v) {
                    *d = *s as f32;
                }
            }
            None => {
                self.index.insert(key.to_string(), self.keys.len());
                self.keys.push(key.to_string());
                self.data.extend(v.iter().map(|x| *x as f32));
            }
        }
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.index.contains_key(key)
    }

    pub fn get_f32(&self, key: &str) -> Option<&[f32]> {
        self.index
            .get(key)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    pub fn get(&self, key: &str) -> Option<Vec<f64>> {
        self.get_f32(key).map(|v| v.iter().map(|x| f64::from(*x)).collect())
    }

    /// Keys in insertion order.
    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Vec<f64>)> {
        self.keys
            .iter()
            .map(move |k| (k.as_str(), self.get(k).expect("indexed key")))
    }

    /// Parses the text format. A leading `count dim` header line is
    /// skipped; duplicate keys keep their first vector.
    pub fn read<R: BufRead>(r: R, path: &Path) -> Result<Embeddings> {
        let mut table: Option<Embeddings> = None;
        let mut buf = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let mut parts = line.split_whitespace();
            let Some(key) = parts.next() else { continue };
            buf.clear();
            for p in parts {
                let v: f64 = p
                    .parse()
                    .map_err(|_| Error::parse(path, i + 1, format!("`{p}` is not a number")))?;
                buf.push(v);
            }
            if i == 0 && buf.len() == 1 && key.parse::<usize>().is_ok() && buf[0].fract() == 0.0 {
                continue;
            }
            if buf.is_empty() {
                return Err(Error::parse(path, i + 1, "vector has no values"));
            }
            let t = table.get_or_insert_with(|| Embeddings::new(buf.len()));
            if buf.len() != t.dim {
                return Err(Error::parse(
                    path,
                    i + 1,
                    format!("expected {} values, found {}", t.dim, buf.len()),
                ));
            }
            if t.contains(key) {
                log::debug!("{}:{}: duplicate key `{key}` ignored", path.display(), i + 1);
                continue;
            }
            t.insert(key, &buf).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        }
        table.ok_or_else(|| Error::parse(path, 0, "no vectors"))
    }

    pub fn load(path: &Path) -> Result<Embeddings> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(std::io::BufReader::new(f), path)
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut line = String::new();
        for (k, i) in self.keys.iter().zip(0..) {
            line.clear();
            line.push_str(k);
            for v in &self.data[i * self.dim..(i + 1) * self.dim] {
                let _ = write!(line, " {v}");
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        w.flush()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write(std::io::BufWriter::new(f)).map_err(|e| Error::io(path, e))
    }
}
