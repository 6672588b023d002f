use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub enum Failure {
    /// Unreadable or invalid input; exit status 2.
    BadInput(anyhow::Error),
    /// The report was written but one of its checks failed; exit status 1.
    CheckFailed(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::BadInput(e)
    }
}

#[derive(Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of every input file, keyed by flag name.
    pub inputs: BTreeMap<String, String>,
    pub outputs: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Columns for `--csv`.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Reads and parses a JSON input, recording its digest under `flag`.
pub fn load<T: DeserializeOwned>(flag: &str, path: &Path, inputs: &mut BTreeMap<String, String>) -> anyhow::Result<T> {
    let bytes = std::fs::read(path).with_context(|| format!("--{flag}: cannot read {}", path.display()))?;
    let digest = Sha256::digest(&bytes);
    inputs.insert(flag.to_string(), digest.iter().map(|b| format!("{b:02x}")).collect());
    serde_json::from_slice(&bytes).with_context(|| format!("--{flag}: invalid {}", path.display()))
}

pub fn write_text(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
