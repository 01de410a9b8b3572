//! Output directory handling, manifests and summaries.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Bad flags, configuration or invocation; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const OUT_ENV: &str = "CONNOTE_OUT";

pub fn default_out(command: &str) -> PathBuf {
    std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
        .join(command)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name, as given.
    pub argv: Vec<String>,
    /// Working directory that relative paths in `argv` refer to.
    pub cwd: String,
    pub seed: Option<u64>,
    pub config_hash: String,
    pub config: RunConfig,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| UsageError(format!("{}:{}: {e}", path.display(), e.line())).into())
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub struct Run {
    command: &'static str,
    argv: Vec<String>,
    out: PathBuf,
    pub config: RunConfig,
    inputs: Vec<PathBuf>,
    outputs: Vec<String>,
}

impl Run {
    pub fn start(command: &'static str, argv: Vec<String>, out: PathBuf, force: bool, config: RunConfig) -> Result<Run> {
        if out.is_file() {
            return Err(UsageError(format!("output path {} is a file", out.display())).into());
        }
        if out.is_dir() && !force && fs::read_dir(&out)?.next().is_some() {
            return Err(UsageError(format!(
                "output directory {} is not empty; pass --force to overwrite",
                out.display()
            ))
            .into());
        }
        fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
        Ok(Run { command, argv, out, config, inputs: Vec::new(), outputs: Vec::new() })
    }

    pub fn seed(&self) -> u64 {
        self.config.seed()
    }

    /// Records an input file for the manifest and returns it.
    pub fn input<'a>(&mut self, path: &'a Path) -> &'a Path {
        self.inputs.push(path.to_path_buf());
        path
    }

    /// Registers a file written directly under the output directory.
    pub fn written(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.out.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
        let path = self.written(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
    }

    pub fn write_with<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut std::io::BufWriter<fs::File>) -> Result<()>,
    {
        let path = self.written(name);
        let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = std::io::BufWriter::new(file);
        f(&mut w)?;
        w.flush().with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// Writes `summary.json` and `manifest.json` and prints `table`.
    pub fn finish(mut self, summary: serde_json::Value, table: &str) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&summary)?;
        text.push('\n');
        self.write("summary.json", text)?;
        let digest = |paths: &[PathBuf]| -> Result<Vec<FileDigest>> {
            paths
                .iter()
                .map(|p| Ok(FileDigest { path: p.display().to_string(), sha256: sha256_file(p)? }))
                .collect()
        };
        let inputs = digest(&self.inputs)?;
        let outputs = self
            .outputs
            .iter()
            .map(|name| Ok(FileDigest { path: name.clone(), sha256: sha256_file(&self.out.join(name))? }))
            .collect::<Result<Vec<_>>>()?;
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: self.command.to_string(),
            argv: self.argv.clone(),
            cwd: std::env::current_dir()?.display().to_string(),
            seed: self.config.seed,
            config_hash: self.config.hash(),
            config: self.config.clone(),
            inputs,
            outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(self.out.join("manifest.json"), text)?;
        print!("{table}");
        println!("outputs in {}", self.out.display());
        Ok(())
    }
}
