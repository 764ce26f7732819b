//! Dataset file formats.
//!
//! CSV: one example per row, last column is the label, header optional (a
//! first row where no field parses as a number is skipped). Feature columns
//! whose values all parse as numbers stay numeric; any other column is
//! treated as categorical and one-hot encoded, distinct values ordered by
//! first appearance.
//!
//! LIBSVM: `label idx:val idx:val ...` with 1-based indices, densified to
//! the maximum index seen in the file.
//!
//! Labels that are already dense nonnegative integers 0..=k are used as-is
//! (so files written by this module round-trip exactly); anything else is
//! mapped to dense ids by first appearance. The mapping is recorded either
//! way.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use fedkt_core::domain::{Dataset, Example};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Libsvm,
}

/// A parsed dataset plus everything needed to interpret it in reports.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    /// Original label token for each class id.
    pub label_mapping: Vec<String>,
    /// Per input column: how it was encoded.
    pub columns: Vec<ColumnEncoding>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ColumnEncoding {
    Numeric { column: usize },
    /// One-hot block: `values[i]` maps to output dimension `offset + i`.
    OneHot { column: usize, values: Vec<String> },
}

pub fn load_dataset(path: &Path, format: DataFormat) -> Result<LoadedDataset> {
    match format {
        DataFormat::Csv => load_csv(path),
        DataFormat::Libsvm => load_libsvm(path),
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn load_csv(path: &Path) -> Result<LoadedDataset> {
    let raw = fs::read_to_string(path).map_err(io_err(path))?;
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    for (line_no, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        rows.push((line_no + 1, fields));
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "empty file"));
    }

    // Header: a first row where no field parses as a number.
    if rows[0].1.iter().all(|f| f.parse::<f64>().is_err()) {
        rows.remove(0);
        if rows.is_empty() {
            return Err(parse_err(path, 2, "no data rows after header"));
        }
    }

    let width = rows[0].1.len();
    if width < 2 {
        return Err(parse_err(path, rows[0].0, "need at least one feature and a label"));
    }
    for (line_no, fields) in &rows {
        if fields.len() != width {
            return Err(parse_err(
                path,
                *line_no,
                format!("expected {width} columns, got {}", fields.len()),
            ));
        }
    }

    // Column typing over feature columns (all but the last).
    let mut columns = Vec::with_capacity(width - 1);
    for col in 0..width - 1 {
        let numeric = rows.iter().all(|(_, f)| f[col].parse::<f64>().is_ok());
        if numeric {
            columns.push(ColumnEncoding::Numeric { column: col });
        } else {
            let mut values: Vec<String> = Vec::new();
            for (_, fields) in &rows {
                if !values.contains(&fields[col]) {
                    values.push(fields[col].clone());
                }
            }
            columns.push(ColumnEncoding::OneHot { column: col, values });
        }
    }

    let label_tokens: Vec<&str> = rows.iter().map(|(_, f)| f[width - 1].as_str()).collect();
    let (labels, label_mapping) = map_labels(&label_tokens);

    let dim: usize = columns
        .iter()
        .map(|c| match c {
            ColumnEncoding::Numeric { .. } => 1,
            ColumnEncoding::OneHot { values, .. } => values.len(),
        })
        .sum();

    let mut examples = Vec::with_capacity(rows.len());
    for (row_idx, (line_no, fields)) in rows.iter().enumerate() {
        let mut features = Vec::with_capacity(dim);
        for encoding in &columns {
            match encoding {
                ColumnEncoding::Numeric { column } => {
                    let value: f64 = fields[*column].parse().map_err(|_| {
                        parse_err(path, *line_no, format!("bad number {:?}", fields[*column]))
                    })?;
                    features.push(value);
                }
                ColumnEncoding::OneHot { column, values } => {
                    let hit = values.iter().position(|v| v == &fields[*column]).unwrap();
                    for i in 0..values.len() {
                        features.push(f64::from(i == hit));
                    }
                }
            }
        }
        examples.push(Example::labeled(features, labels[row_idx]));
    }

    let num_classes = label_mapping.len();
    let dataset = Dataset::new(num_classes, dim, examples)?;
    Ok(LoadedDataset {
        dataset,
        label_mapping,
        columns,
    })
}

fn load_libsvm(path: &Path) -> Result<LoadedDataset> {
    let raw = fs::read_to_string(path).map_err(io_err(path))?;
    let mut parsed: Vec<(usize, String, Vec<(usize, f64)>)> = Vec::new();
    let mut max_index = 0usize;
    for (line_no, line) in raw.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label = tokens
            .next()
            .ok_or_else(|| parse_err(path, line_no, "missing label"))?
            .to_string();
        let mut pairs = Vec::new();
        for token in tokens {
            let (idx, val) = token
                .split_once(':')
                .ok_or_else(|| parse_err(path, line_no, format!("bad feature token {token:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("bad feature index {idx:?}")))?;
            if idx == 0 {
                return Err(parse_err(path, line_no, "feature indices are 1-based"));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("bad feature value {val:?}")))?;
            max_index = max_index.max(idx);
            pairs.push((idx, val));
        }
        parsed.push((line_no, label, pairs));
    }
    if parsed.is_empty() {
        return Err(parse_err(path, 1, "empty file"));
    }

    let label_tokens: Vec<&str> = parsed.iter().map(|(_, l, _)| l.as_str()).collect();
    let (labels, label_mapping) = map_labels(&label_tokens);

    let mut examples = Vec::with_capacity(parsed.len());
    for (row, (_, _, pairs)) in parsed.iter().enumerate() {
        let mut features = vec![0.0; max_index];
        for &(idx, val) in pairs {
            features[idx - 1] = val;
        }
        examples.push(Example::labeled(features, labels[row]));
    }
    let dataset = Dataset::new(label_mapping.len(), max_index, examples)?;
    Ok(LoadedDataset {
        dataset,
        label_mapping,
        columns: (0..max_index)
            .map(|column| ColumnEncoding::Numeric { column })
            .collect(),
    })
}

/// Dense nonnegative integer labels 0..=k pass through unchanged; anything
/// else is mapped by first appearance.
fn map_labels(tokens: &[&str]) -> (Vec<usize>, Vec<String>) {
    let as_dense: Option<Vec<usize>> = tokens
        .iter()
        .map(|t| {
            let v: f64 = t.parse().ok()?;
            if v >= 0.0 && v.fract() == 0.0 && v < usize::MAX as f64 {
                Some(v as usize)
            } else {
                None
            }
        })
        .collect();
    if let Some(ints) = as_dense {
        let max = *ints.iter().max().unwrap();
        let mut present = vec![false; max + 1];
        for &i in &ints {
            present[i] = true;
        }
        if present.iter().all(|&p| p) {
            let mapping = (0..=max).map(|i| i.to_string()).collect();
            return (ints, mapping);
        }
    }
    let mut mapping: Vec<String> = Vec::new();
    let labels = tokens
        .iter()
        .map(|t| match mapping.iter().position(|m| m == t) {
            Some(id) => id,
            None => {
                mapping.push(t.to_string());
                mapping.len() - 1
            }
        })
        .collect();
    (labels, mapping)
}

/// Write a fully labeled dataset as headerless CSV (features, then the
/// label as a dense integer). Values use the shortest round-trip decimal
/// form, so reading the file back reproduces them exactly.
pub fn write_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::new();
    for i in 0..dataset.len() {
        let label = dataset
            .label(i)
            .ok_or_else(|| Error::Config(format!("example {i} has no label to write")))?;
        for value in dataset.features(i) {
            out.push_str(&format!("{value},"));
        }
        out.push_str(&format!("{}\n", label.index()));
    }
    fs::write(path, out).map_err(io_err(path))
}
