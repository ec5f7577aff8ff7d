//! Tabular output with a metadata block, serialized as CSV or JSON.
//!
//! CSV files open with `# key: value` comment lines, followed by a header
//! row and one record per row; floats are written with 17 significant digits
//! so every value parses back bit-for-bit. JSON files are one object with
//! `metadata` (which also lists the column names) and `rows`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("row {row} has {got} values, expected {expected}")]
    RowWidth {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("non-finite value {value} in column `{column}`")]
    NonFinite { column: String, value: f64 },
    #[error("invalid metadata entry `{0}`")]
    Metadata(String),
    #[error("malformed table: {0}")]
    Malformed(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Key under which JSON output lists the column names.
const COLUMNS_KEY: &str = "columns";

#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    metadata: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    metadata: JsonMetadata,
    rows: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct JsonMetadata {
    columns: Vec<String>,
    #[serde(flatten)]
    entries: BTreeMap<String, String>,
}

impl OutputTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    /// Keys are non-empty and free of `:` and line breaks; values are single lines.
    pub fn set_meta(&mut self, key: &str, value: impl ToString) -> Result<(), TableError> {
        let value = value.to_string();
        let bad_key = key.is_empty()
            || key == COLUMNS_KEY
            || key != key.trim()
            || key.contains([':', '\n', '\r']);
        if bad_key || value.contains(['\n', '\r']) || value != value.trim() {
            return Err(TableError::Metadata(format!("{key}: {value}")));
        }
        self.metadata.insert(key.to_owned(), value);
        Ok(())
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<(), TableError> {
        if row.len() != self.columns.len() {
            return Err(TableError::RowWidth {
                row: self.rows.len(),
                got: row.len(),
                expected: self.columns.len(),
            });
        }
        if let Some((i, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(TableError::NonFinite {
                column: self.columns[i].clone(),
                value: *v,
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write<W: Write>(&self, format: Format, mut out: W) -> Result<(), TableError> {
        match format {
            Format::Csv => self.write_csv(&mut out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json_repr())?;
                writeln!(out)?;
                Ok(())
            }
        }
    }

    pub fn render(&self, format: Format) -> Result<String, TableError> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        String::from_utf8(buf).map_err(|e| TableError::Malformed(e.to_string()))
    }

    pub fn parse(format: Format, text: &str) -> Result<Self, TableError> {
        match format {
            Format::Csv => Self::parse_csv(text),
            Format::Json => Self::from_json_repr(serde_json::from_str(text)?),
        }
    }

    fn write_csv<W: Write>(&self, out: &mut W) -> Result<(), TableError> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
        }
        w.flush()?;
        Ok(())
    }

    fn parse_csv(text: &str) -> Result<Self, TableError> {
        let mut metadata = BTreeMap::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(entry) = line.strip_prefix("# ") else {
                break;
            };
            let entry = entry.trim_end_matches(['\n', '\r']);
            let (k, v) = entry
                .split_once(": ")
                .or_else(|| entry.strip_suffix(':').map(|k| (k, "")))
                .ok_or_else(|| TableError::Metadata(entry.to_owned()))?;
            metadata.insert(k.to_owned(), v.to_owned());
            body_start += line.len();
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(&text.as_bytes()[body_start..]);
        let columns: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        let mut table = Self {
            columns,
            rows: Vec::new(),
            metadata,
        };
        for record in reader.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|_| TableError::Malformed(format!("`{f}` is not a number")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            table.push_row(row)?;
        }
        Ok(table)
    }

    fn to_json_repr(&self) -> JsonTable {
        JsonTable {
            metadata: JsonMetadata {
                columns: self.columns.clone(),
                entries: self.metadata.clone(),
            },
            rows: self.rows.clone(),
        }
    }

    fn from_json_repr(repr: JsonTable) -> Result<Self, TableError> {
        let mut table = Self {
            columns: repr.metadata.columns,
            rows: Vec::with_capacity(repr.rows.len()),
            metadata: repr.metadata.entries,
        };
        for row in repr.rows {
            table.push_row(row)?;
        }
        Ok(table)
    }
}
