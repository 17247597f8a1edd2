//! CSV output with 17 significant digits and JSON manifests carrying a
//! config hash and per-file digests.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

pub const TOOL: &str = "dskg";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Round-trip exact representation of a double.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a header row and numeric rows.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Validation(format!(
                "row of {} values for {} columns",
                row.len(),
                header.len()
            )));
        }
        w.write_record(row.iter().map(|v| format_f64(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Header and rows of a numeric CSV file.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Io(format!("bad number `{s}`: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn file_sha256(path: &Path) -> Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

/// Digest of the config's canonical JSON (object keys sorted).
pub fn config_hash(config: &Value) -> String {
    sha256_hex(canonical(config).to_string().as_bytes())
}

fn canonical(v: &Value) -> Value {
    match v {
        Value::Object(m) => {
            let sorted: BTreeMap<_, _> = m.iter().map(|(k, v)| (k.clone(), canonical(v))).collect();
            Value::Object(sorted.into_iter().collect())
        }
        Value::Array(a) => Value::Array(a.iter().map(canonical).collect()),
        other => other.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub config_hash: String,
    pub outputs: Vec<OutputFile>,
    /// Free-form results (fitted constants, pass flags, ...).
    #[serde(default)]
    pub summary: Value,
}

impl Manifest {
    pub fn new(command: &str, config: Value) -> Self {
        Manifest {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            config_hash: config_hash(&config),
            config,
            outputs: Vec::new(),
            summary: Value::Null,
        }
    }

    /// Records `path` (relative to the manifest's directory) with its digest.
    pub fn add_output(&mut self, dir: &Path, name: &str) -> Result<()> {
        let sha256 = file_sha256(&dir.join(name))?;
        self.outputs.push(OutputFile {
            file: name.into(),
            sha256,
        });
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// Recomputes the config hash and every output digest; lists mismatches.
    pub fn verify(&self, dir: &Path) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        if config_hash(&self.config) != self.config_hash {
            bad.push("config_hash".to_string());
        }
        for o in &self.outputs {
            let p: PathBuf = dir.join(&o.file);
            if !p.exists() || file_sha256(&p)? != o.sha256 {
                bad.push(o.file.clone());
            }
        }
        Ok(bad)
    }
}

/// Flat `key = value` text; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Validation(format!("config line {}: expected key = value", i + 1))
        })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Validation(format!(
                "config line {}: empty key",
                i + 1
            )));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}
