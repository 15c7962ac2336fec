//! CSV emission with `#`-prefixed metadata lines.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::Result;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub extra: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(command: &str, config_hash: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            seed,
            extra: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.push((key.to_string(), value.to_string()));
        self
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "# command: {}", self.command)?;
        writeln!(out, "# config_hash: {}", self.config_hash)?;
        writeln!(out, "# seed: {}", self.seed)?;
        writeln!(out, "# code_version: {CODE_VERSION}")?;
        for (k, v) in &self.extra {
            writeln!(out, "# {k}: {v}")?;
        }
        Ok(())
    }
}

/// A CSV table held in memory until written.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width does not match header"
        );
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|x| num(*x)).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_to<W: Write>(&self, out: &mut W, meta: &Metadata) -> std::io::Result<()> {
        meta.write_to(out)?;
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn save(&self, dir: &Path, name: &str, meta: &Metadata) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(name);
        let mut out = BufWriter::new(fs::File::create(&path)?);
        self.write_to(&mut out, meta)?;
        out.flush()?;
        Ok(path)
    }
}

/// Shortest round-trip decimal form; `NaN` and infinities as `nan`, `inf`, `-inf`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x}")
    }
}
