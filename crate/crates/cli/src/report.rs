//! Tabular reports written as JSON or CSV.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// One check's output. Cells are `None` where a sequence has no entry
/// (written as `null` in JSON, empty in CSV).
#[derive(Debug)]
pub struct Report {
    pub check: &'static str,
    pub config: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Report {
    pub fn new(check: &'static str, config: Map<String, Value>, columns: Vec<&'static str>) -> Self {
        Self { check, config, columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> String {
        let v = json!({
            "check": self.check,
            "config": self.config,
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# check: {}", self.check).unwrap();
        let config = serde_json::to_string(&self.config).expect("config serializes");
        writeln!(s, "# config: {config}").unwrap();
        writeln!(s, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.map(|x| x.to_string()).unwrap_or_default()).collect();
            writeln!(s, "{}", cells.join(",")).unwrap();
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Writes the whole report at once, to `out` or to stdout.
    pub fn write(&self, format: Format, out: Option<&Path>) -> io::Result<()> {
        let text = self.render(format);
        match out {
            Some(path) => fs::write(path, text),
            None => io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}

pub fn flag(b: bool) -> Option<f64> {
    Some(if b { 1.0 } else { 0.0 })
}
