//! Datasets: ingestion, encoding, fold generation and resampling.

mod arff;
mod delimited;
mod encode;
mod folds;
pub mod synthetic;

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use encode::{encode, AttributeEncoding, ColumnKind, ColumnSource, EncodedDataset, Encoder, Matrix};
pub use folds::{bootstrap_indices, bootstrap_sample, stratified_folds, stratified_folds_for_labels};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum AttributeKind {
    Numeric,
    Nominal { values: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    #[serde(flatten)]
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn numeric(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Numeric,
        }
    }

    pub fn nominal<S: Into<String>>(name: impl Into<String>, values: impl IntoIterator<Item = S>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Nominal {
                values: values.into_iter().map(Into::into).collect(),
            },
        }
    }
}

/// A single raw feature value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Numeric(f64),
    /// Index into the attribute's nominal value list.
    Nominal(usize),
    Missing,
}

/// Feature attributes plus the class attribute and its value list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub attributes: Vec<Attribute>,
    pub class_attribute: String,
    pub classes: Vec<String>,
}

impl Schema {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    /// Checks that a raw row fits this schema.
    pub fn check_row(&self, row: &[Value]) -> Result<()> {
        if row.len() != self.attributes.len() {
            return Err(Error::usage(format!(
                "row has {} values, schema has {} attributes",
                row.len(),
                self.attributes.len()
            )));
        }
        for (value, attr) in row.iter().zip(&self.attributes) {
            match (value, &attr.kind) {
                (Value::Missing, _) | (Value::Numeric(_), AttributeKind::Numeric) => {}
                (Value::Nominal(i), AttributeKind::Nominal { values }) if *i < values.len() => {}
                _ => {
                    return Err(Error::usage(format!(
                        "value {value:?} does not fit attribute '{}'",
                        attr.name
                    )))
                }
            }
        }
        Ok(())
    }
}

/// Labeled instances with per-instance weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    rows: Vec<Vec<Value>>,
    labels: Vec<usize>,
    weights: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset with unit weights, validating every invariant.
    pub fn new(schema: Schema, rows: Vec<Vec<Value>>, labels: Vec<usize>) -> Result<Self> {
        let weights = vec![1.0; rows.len()];
        Self::with_weights(schema, rows, labels, weights)
    }

    pub fn with_weights(schema: Schema, rows: Vec<Vec<Value>>, labels: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if schema.classes.len() < 2 {
            return Err(Error::data("at least 2 classes required"));
        }
        if rows.len() != labels.len() || rows.len() != weights.len() {
            return Err(Error::data("rows, labels and weights differ in length"));
        }
        if rows.is_empty() {
            return Err(Error::data("dataset has no instances"));
        }
        for row in &rows {
            schema.check_row(row).map_err(|e| Error::data(e.to_string()))?;
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= schema.classes.len()) {
            return Err(Error::data(format!("label index {bad} out of range")));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::data("weights must be finite and non-negative"));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::data("at least one weight must be positive"));
        }
        Ok(Dataset {
            schema,
            rows,
            labels,
            weights,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.schema.classes.len()
    }

    /// Instance count per class index.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// New dataset holding the given instances (repeats allowed), same schema.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        Dataset::with_weights(
            self.schema.clone(),
            indices.iter().map(|&i| self.rows[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
            indices.iter().map(|&i| self.weights[i]).collect(),
        )
    }

    pub fn reweighted(&self, weights: Vec<f64>) -> Result<Dataset> {
        Dataset::with_weights(self.schema.clone(), self.rows.clone(), self.labels.clone(), weights)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Arff,
    Csv,
}

impl Format {
    /// `.arff` files are ARFF, everything else is CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("arff") => Format::Arff,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "arff" => Ok(Format::Arff),
            "csv" => Ok(Format::Csv),
            other => Err(Error::usage(format!("unknown format '{other}'"))),
        }
    }
}

/// Which column holds the class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ClassSelector {
    Name(String),
    Index(usize),
    #[default]
    Last,
}

impl ClassSelector {
    /// Parses a CLI-style selector: a name, or a 0-based index.
    pub fn parse(s: &str) -> ClassSelector {
        match s.parse::<usize>() {
            Ok(i) => ClassSelector::Index(i),
            Err(_) => ClassSelector::Name(s.to_string()),
        }
    }

    fn resolve(&self, names: &[String]) -> Result<usize> {
        match self {
            ClassSelector::Last if !names.is_empty() => Ok(names.len() - 1),
            ClassSelector::Last => Err(Error::usage("no columns")),
            ClassSelector::Name(n) => names
                .iter()
                .position(|c| c == n)
                .ok_or_else(|| Error::usage(format!("unknown class attribute '{n}'"))),
            ClassSelector::Index(i) => {
                // a column literally named like the index wins
                if let Some(p) = names.iter().position(|c| *c == i.to_string()) {
                    return Ok(p);
                }
                if *i < names.len() {
                    Ok(*i)
                } else {
                    Err(Error::usage(format!("class index {i} out of range")))
                }
            }
        }
    }
}

/// Columns and cells as read from a file, before typing.
#[derive(Debug)]
struct RawTable {
    names: Vec<String>,
    /// Declared kinds (ARFF) or `None` (CSV, inferred).
    declared: Option<Vec<AttributeKind>>,
    /// (line number, cells); `None` is a missing cell.
    records: Vec<(usize, Vec<Option<String>>)>,
}

fn read_table(mut source: impl Read, format: Format) -> Result<RawTable> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    match format {
        Format::Arff => arff::parse(&text),
        Format::Csv => delimited::parse(&text),
    }
}

/// Reads a labeled dataset from `source`.
pub fn load_dataset(source: impl Read, format: Format, class: &ClassSelector) -> Result<Dataset> {
    let table = read_table(source, format)?;
    let class_col = class.resolve(&table.names)?;
    let declared = table.declared.clone();

    let classes: Vec<String> = match declared.as_ref().map(|d| &d[class_col]) {
        Some(AttributeKind::Nominal { values }) => values.clone(),
        Some(AttributeKind::Numeric) => {
            return Err(Error::data(format!(
                "class attribute '{}' must be nominal",
                table.names[class_col]
            )))
        }
        None => {
            let mut seen: Vec<String> = Vec::new();
            for (_, cells) in &table.records {
                if let Some(v) = &cells[class_col] {
                    if !seen.contains(v) {
                        seen.push(v.clone());
                    }
                }
            }
            seen
        }
    };

    let mut attributes = Vec::new();
    let mut columns = Vec::new();
    for (col, name) in table.names.iter().enumerate() {
        if col == class_col {
            continue;
        }
        let kind = match &declared {
            Some(d) => d[col].clone(),
            None => infer_kind(&table.records, col),
        };
        attributes.push(Attribute {
            name: name.clone(),
            kind,
        });
        columns.push(col);
    }

    let schema = Schema {
        attributes,
        class_attribute: table.names[class_col].clone(),
        classes,
    };

    let mut rows = Vec::with_capacity(table.records.len());
    let mut labels = Vec::with_capacity(table.records.len());
    for (line, cells) in &table.records {
        let label = match &cells[class_col] {
            None => return Err(Error::data(format!("missing class value at line {line}"))),
            Some(v) => schema
                .classes
                .iter()
                .position(|c| c == v)
                .ok_or_else(|| Error::parse(*line, format!("undeclared class value '{v}'")))?,
        };
        let row = columns
            .iter()
            .zip(&schema.attributes)
            .map(|(&col, attr)| typed_value(cells[col].as_deref(), attr, *line))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
        labels.push(label);
    }

    let present = {
        let mut seen = vec![false; schema.classes.len()];
        labels.iter().for_each(|&l| seen[l] = true);
        seen.into_iter().filter(|&s| s).count()
    };
    if present < 2 {
        return Err(Error::data("at least 2 classes required"));
    }
    Dataset::new(schema, rows, labels)
}

/// Reads a dataset file from disk; the format defaults to the file extension.
pub fn load_path(path: &Path, format: Option<Format>, class: &ClassSelector) -> Result<Dataset> {
    let format = format.unwrap_or_else(|| Format::from_path(path));
    let file = File::open(path)?;
    load_dataset(BufReader::new(file), format, class)
}

/// Reads instances aligned to an existing schema, matching columns by name.
/// A class column, if present, is ignored.
pub fn load_instances(source: impl Read, format: Format, schema: &Schema) -> Result<Vec<Vec<Value>>> {
    let table = read_table(source, format)?;
    let positions = schema
        .attributes
        .iter()
        .map(|a| {
            table
                .names
                .iter()
                .position(|n| *n == a.name)
                .ok_or_else(|| Error::data(format!("attribute '{}' missing from input", a.name)))
        })
        .collect::<Result<Vec<_>>>()?;
    table
        .records
        .iter()
        .map(|(line, cells)| {
            positions
                .iter()
                .zip(&schema.attributes)
                .map(|(&col, attr)| typed_value(cells[col].as_deref(), attr, *line))
                .collect()
        })
        .collect()
}

fn infer_kind(records: &[(usize, Vec<Option<String>>)], col: usize) -> AttributeKind {
    let numeric = records
        .iter()
        .filter_map(|(_, cells)| cells[col].as_deref())
        .all(|v| v.parse::<f64>().is_ok());
    if numeric {
        return AttributeKind::Numeric;
    }
    let mut values: Vec<String> = Vec::new();
    for v in records.iter().filter_map(|(_, cells)| cells[col].as_ref()) {
        if !values.contains(v) {
            values.push(v.clone());
        }
    }
    AttributeKind::Nominal { values }
}

fn typed_value(cell: Option<&str>, attr: &Attribute, line: usize) -> Result<Value> {
    let Some(cell) = cell else {
        return Ok(Value::Missing);
    };
    match &attr.kind {
        AttributeKind::Numeric => cell
            .parse::<f64>()
            .map(Value::Numeric)
            .map_err(|_| Error::parse(line, format!("'{cell}' is not numeric (attribute '{}')", attr.name))),
        AttributeKind::Nominal { values } => values
            .iter()
            .position(|v| v == cell)
            .map(Value::Nominal)
            .ok_or_else(|| Error::parse(line, format!("undeclared value '{cell}' for attribute '{}'", attr.name))),
    }
}
