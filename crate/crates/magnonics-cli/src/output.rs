//! Output rendering: a small column-typed table model, deterministic CSV and
//! JSON serialization, and the run manifest written alongside file outputs.
//!
//! Data files carry no timestamps or machine state, so reruns of the same
//! configuration are byte-identical; the manifest holds the timestamp.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::ConfigFile;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            // {:e} prints the shortest round-trip form, so equal values
            // always serialize to equal bytes.
            Cell::Float(v) => format!("{v:e}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => {
                assert!(
                    !v.contains([',', '\n', '"']),
                    "text cells must not need CSV quoting: {v:?}"
                );
                v.clone()
            }
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Float(v) if v.is_finite() => serde_json::json!(v),
            Cell::Float(_) => serde_json::Value::Null,
            Cell::Bool(v) => serde_json::json!(v),
            Cell::Text(v) => serde_json::json!(v),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Cell {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Text(v.to_string())
    }
}

/// A rectangular result table; every command renders one.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn render_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::to_csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render_json(&self) -> String {
        let value = serde_json::json!({
            "columns": self.columns,
            "rows": self.rows.iter()
                .map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        });
        let mut text = serde_json::to_string_pretty(&value).expect("static structure");
        text.push('\n');
        text
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Manifest describing one file-producing run.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// RFC 3339 UTC creation time; the only timestamp any output carries.
    pub created_utc: String,
    /// Subcommand and the options that shaped the data.
    pub command: String,
    /// Snapshot of the full configuration the run used.
    pub config: ConfigFile,
    /// Files written by the run, relative to the manifest.
    pub outputs: Vec<String>,
    /// Number of grid points that failed and were emitted as NaN rows.
    pub warnings: usize,
}

/// Write `table` to `out` (stdout when None). With a file target, a manifest
/// lands alongside as `<out>.manifest.json`. Returns the files written.
pub fn deliver(
    table: &Table,
    format: Format,
    out: Option<&Path>,
    command: &str,
    config: &ConfigFile,
    warnings: usize,
) -> Result<Vec<PathBuf>> {
    let rendered = match format {
        Format::Csv => table.render_csv(),
        Format::Json => table.render_json(),
    };
    match out {
        None => {
            std::io::stdout()
                .write_all(rendered.as_bytes())
                .context("writing to stdout")?;
            if warnings > 0 {
                eprintln!("warning: {warnings} grid points failed and were emitted as NaN");
            }
            Ok(Vec::new())
        }
        Some(path) => {
            fs::write(path, rendered)
                .with_context(|| format!("writing output file {}", path.display()))?;
            let manifest_path = manifest_path_for(path);
            let manifest = RunManifest {
                tool: "magnonics".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                created_utc: chrono::Utc::now().to_rfc3339(),
                command: command.to_string(),
                config: config.clone(),
                outputs: vec![path
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string())],
                warnings,
            };
            let mut text =
                serde_json::to_string_pretty(&manifest).context("serializing manifest")?;
            text.push('\n');
            fs::write(&manifest_path, text)
                .with_context(|| format!("writing manifest {}", manifest_path.display()))?;
            if warnings > 0 {
                eprintln!("warning: {warnings} grid points failed and were emitted as NaN");
            }
            Ok(vec![path.to_path_buf(), manifest_path])
        }
    }
}

fn manifest_path_for(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    name.push_str(".manifest.json");
    out.with_file_name(name)
}
