//! CSV and JSON artifacts. CSVs end with a `#`-prefixed metadata block.

use crate::config::CliError;
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

pub fn fmt_f(v: f64) -> String {
    format!("{v:.17e}")
}

pub struct Csv {
    text: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: format!("{}\n", header.join(",")), width: header.len() }
    }

    pub fn row(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.width);
        let cells: Vec<String> = values.iter().map(|v| fmt_f(*v)).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(mut self, meta: &BTreeMap<String, String>) -> String {
        for (k, v) in meta {
            let _ = writeln!(self.text, "# {k}: {v}");
        }
        self.text
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

pub fn write_json(dir: &Path, name: &str, v: &Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    write_file(dir, name, &s)
}

/// Metadata common to every artifact.
pub fn base_meta(hash: &str, tolerances: &[(&str, f64)]) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("config_hash".into(), hash.to_string());
    for (k, v) in tolerances {
        m.insert(format!("tol.{k}"), format!("{v:e}"));
    }
    m
}
