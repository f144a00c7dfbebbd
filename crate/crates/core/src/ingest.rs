//! Membership tables: CSV/JSON parsing, column renormalization and Likert
//! conversion.
//!
//! The canonical interchange is CSV with header `index,label,mu_a,mu_b,mu_ab`;
//! the JSON form mirrors it field for field. Parsed columns are renormalized
//! to sum to one unless [`ParseOptions::renormalize`] is switched off.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

pub const CSV_HEADER: [&str; 5] = ["index", "label", "mu_a", "mu_b", "mu_ab"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("{0}")]
    Domain(String),
    #[error("rating {degree} at position {position} outside [-3, 3]")]
    DegreeOutOfRange { position: usize, degree: i32 },
    #[error("all ratings are -3; shifted ratings sum to zero")]
    ZeroSum,
}

/// One row of a membership table: collapse probabilities of item `index`
/// for concept A, concept B and the disjunction "A or B".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemRecord {
    pub index: u32,
    pub label: String,
    pub mu_a: f64,
    pub mu_b: f64,
    pub mu_ab: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Column {
    A,
    B,
    AorB,
}

impl Column {
    pub const ALL: [Column; 3] = [Column::A, Column::B, Column::AorB];

    pub fn of(self, item: &ItemRecord) -> f64 {
        match self {
            Column::A => item.mu_a,
            Column::B => item.mu_b,
            Column::AorB => item.mu_ab,
        }
    }

    fn of_mut(self, item: &mut ItemRecord) -> &mut f64 {
        match self {
            Column::A => &mut item.mu_a,
            Column::B => &mut item.mu_b,
            Column::AorB => &mut item.mu_ab,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Column::A => "mu_a",
            Column::B => "mu_b",
            Column::AorB => "mu_ab",
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Column::A => "A",
            Column::B => "B",
            Column::AorB => "A or B",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptPairData {
    #[serde(rename = "concept_a")]
    pub concept_a_label: String,
    #[serde(rename = "concept_b")]
    pub concept_b_label: String,
    pub items: Vec<ItemRecord>,
}

impl ConceptPairData {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn column(&self, column: Column) -> Vec<f64> {
        self.items.iter().map(|it| column.of(it)).collect()
    }

    pub fn column_sum(&self, column: Column) -> f64 {
        self.items.iter().map(|it| column.of(it)).sum()
    }

    /// Divides each column by its sum. Columns summing to zero are left alone.
    pub fn renormalize(&mut self) {
        for column in Column::ALL {
            let sum = self.column_sum(column);
            if sum > 0.0 && sum != 1.0 {
                for item in &mut self.items {
                    *column.of_mut(item) /= sum;
                }
            }
        }
    }

    pub fn renormalized(&self) -> Self {
        let mut out = self.clone();
        out.renormalize();
        out
    }

    pub fn find(&self, label: &str) -> Option<&ItemRecord> {
        self.items.iter().find(|it| it.label == label)
    }

    /// CSV with LF line endings and shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for it in &self.items {
            w.write_record([
                it.index.to_string(),
                it.label.clone(),
                it.mu_a.to_string(),
                it.mu_b.to_string(),
                it.mu_ab.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

impl TableFormat {
    /// Guesses the format from a file name; anything but `.json` is CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => TableFormat::Json,
            _ => TableFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    pub renormalize: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { renormalize: true }
    }
}

#[derive(Deserialize)]
struct CsvRow {
    index: u32,
    label: String,
    mu_a: f64,
    mu_b: f64,
    mu_ab: f64,
}

/// Parses a membership table. Values are range-checked before the optional
/// per-column renormalization.
pub fn parse_probability_table(
    text: &str,
    format: TableFormat,
    options: ParseOptions,
) -> Result<ConceptPairData, IngestError> {
    let (mut data, lines) = match format {
        TableFormat::Csv => parse_csv(text)?,
        TableFormat::Json => parse_json(text)?,
    };
    check_items(&data, &lines)?;
    if options.renormalize {
        data.renormalize();
    }
    Ok(data)
}

fn parse_csv(text: &str) -> Result<(ConceptPairData, Vec<u64>), IngestError> {
    if text.trim().is_empty() {
        return Err(IngestError::Domain("no items".into()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| IngestError::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if header.iter().map(str::trim).ne(CSV_HEADER) {
        return Err(IngestError::Parse {
            line: 1,
            message: format!("expected header `{}`", CSV_HEADER.join(",")),
        });
    }
    let mut items = Vec::new();
    let mut lines = Vec::new();
    for record in reader.deserialize::<CsvRow>() {
        let row = record.map_err(|e| IngestError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
                _ => e.to_string(),
            },
        })?;
        lines.push(lines.len() as u64 + 2);
        items.push(ItemRecord {
            index: row.index,
            label: row.label,
            mu_a: row.mu_a,
            mu_b: row.mu_b,
            mu_ab: row.mu_ab,
        });
    }
    let data = ConceptPairData {
        concept_a_label: "A".into(),
        concept_b_label: "B".into(),
        items,
    };
    Ok((data, lines))
}

fn parse_json(text: &str) -> Result<(ConceptPairData, Vec<u64>), IngestError> {
    if text.trim().is_empty() {
        return Err(IngestError::Domain("no items".into()));
    }
    let data: ConceptPairData = serde_json::from_str(text).map_err(|e| IngestError::Parse {
        line: e.line() as u64,
        message: e.to_string(),
    })?;
    // JSON rows have no meaningful line; report the 1-based item position instead
    let lines = (1..=data.items.len() as u64).collect();
    Ok((data, lines))
}

fn check_items(data: &ConceptPairData, lines: &[u64]) -> Result<(), IngestError> {
    match data.items.len() {
        0 => return Err(IngestError::Domain("no items".into())),
        1 => return Err(IngestError::Domain("at least 2 items are required".into())),
        _ => {}
    }
    let mut seen = HashSet::new();
    for (item, &line) in data.items.iter().zip(lines) {
        if item.index == 0 {
            return Err(IngestError::Parse {
                line,
                message: "index must be positive".into(),
            });
        }
        if !seen.insert(item.index) {
            return Err(IngestError::Parse {
                line,
                message: format!("duplicate index {}", item.index),
            });
        }
        for column in Column::ALL {
            let v = column.of(item);
            if !(0.0..=1.0).contains(&v) {
                return Err(IngestError::Domain(format!(
                    "line {line}: {} = {v} for item `{}` outside [0, 1]",
                    column.name(),
                    item.label
                )));
            }
        }
    }
    Ok(())
}

/// Shift-and-normalize: `(r_k + 3) / Σ_j (r_j + 3)` for ratings in `[-3, 3]`.
pub fn likert_to_collapse_probabilities(ratings: &[i32]) -> Result<Vec<f64>, IngestError> {
    if ratings.is_empty() {
        return Err(IngestError::Domain("no ratings".into()));
    }
    if let Some((position, &degree)) = ratings
        .iter()
        .enumerate()
        .find(|(_, d)| !(-3..=3).contains(*d))
    {
        return Err(IngestError::DegreeOutOfRange { position, degree });
    }
    let total: i64 = ratings.iter().map(|&d| i64::from(d) + 3).sum();
    if total == 0 {
        return Err(IngestError::ZeroSum);
    }
    Ok(ratings
        .iter()
        .map(|&d| (f64::from(d) + 3.0) / total as f64)
        .collect())
}

/// Raw Likert degrees for one measured concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikertTable {
    pub concept: String,
    pub items: Vec<(String, i32)>,
}

impl LikertTable {
    pub fn collapse_probabilities(&self) -> Result<Vec<(String, f64)>, IngestError> {
        let degrees: Vec<i32> = self.items.iter().map(|(_, d)| *d).collect();
        let probs = likert_to_collapse_probabilities(&degrees)?;
        Ok(self
            .items
            .iter()
            .map(|(l, _)| l.clone())
            .zip(probs)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ColumnSum {
        column: Column,
        sum: f64,
    },
    OutOfRange {
        index: u32,
        label: String,
        column: Column,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ColumnSum { column, sum } => write!(f, "column {column} sums to {sum}"),
            Violation::OutOfRange {
                index,
                label,
                column,
                value,
            } => {
                write!(
                    f,
                    "item {index} `{label}`: column {column} value {value} outside [0, 1]"
                )
            }
        }
    }
}

/// Report-only check: empty iff every entry lies in `[0, 1]` and each column
/// sums to one within `tol`.
pub fn validate_normalization(data: &ConceptPairData, tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    for item in &data.items {
        for column in Column::ALL {
            let value = column.of(item);
            if !(0.0..=1.0).contains(&value) {
                out.push(Violation::OutOfRange {
                    index: item.index,
                    label: item.label.clone(),
                    column,
                    value,
                });
            }
        }
    }
    for column in Column::ALL {
        let sum = data.column_sum(column);
        if !((sum - 1.0).abs() <= tol) {
            out.push(Violation::ColumnSum { column, sum });
        }
    }
    out
}
