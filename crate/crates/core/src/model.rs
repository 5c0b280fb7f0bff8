//! Datasets, dimensions and kind inference.
//!
//! A [`Dataset`] is an immutable table: every [`DataPoint`] carries a stable
//! integer id (its row index at ingestion) and one [`Value`] per schema column.
//! Each column is summarized by a [`Dimension`] holding its inferred
//! [`DimensionKind`], its domain and a tally of missing cells.

use std::collections::HashSet;
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Numeric columns with at most this many distinct integer values are ordinal.
pub const ORDINAL_MAX_DISTINCT: usize = 12;

/// Stable identity of a data point within its dataset.
pub type PointId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("input has no data rows")]
    EmptyInput,
    #[error("row {row}: {message}")]
    Schema { row: usize, message: String },
    #[error("csv: {0}")]
    Csv(String),
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("dimension `{name}`: {message}")]
    InvalidOverride { name: String, message: String },
}

/// A single cell value.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
    Missing,
}

impl Value {
    /// Parses a raw text field: blank is missing, finite decimals are numbers,
    /// anything else is text.
    pub fn parse(field: &str) -> Value {
        let trimmed = field.trim();
        if trimmed.is_empty() {
            return Value::Missing;
        }
        if looks_numeric(trimmed) {
            if let Ok(v) = trimmed.parse::<f64>() {
                if v.is_finite() {
                    return Value::Number(v);
                }
            }
        }
        Value::Text(field.to_string())
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            _ => None,
        }
    }

    /// Text used for labels and category matching.
    pub fn label(&self) -> String {
        match self {
            Value::Number(v) => format_number(*v),
            Value::Text(s) => s.clone(),
            Value::Missing => String::new(),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Number(a), Value::Number(b)) => a.to_bits() == b.to_bits(),
            (Value::Text(a), Value::Text(b)) => a == b,
            (Value::Missing, Value::Missing) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

// `f64::from_str` also accepts "inf", "NaN" and friends; only plain decimals
// with an optional exponent count as numbers here.
fn looks_numeric(s: &str) -> bool {
    s.bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'))
        && s.bytes().any(|b| b.is_ascii_digit())
}

/// Shortest decimal rendering of a number, without a trailing `.0`.
pub fn format_number(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataPoint {
    pub id: PointId,
    values: Vec<Value>,
}

impl DataPoint {
    pub fn values(&self) -> &[Value] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DimensionKind {
    Nominal,
    Ordinal,
    Quantitative,
}

impl fmt::Display for DimensionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DimensionKind::Nominal => "nominal",
            DimensionKind::Ordinal => "ordinal",
            DimensionKind::Quantitative => "quantitative",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Domain {
    /// Distinct values in segment order.
    Categories { values: Vec<Value> },
    /// Observed numeric range.
    Range { min: f64, max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dimension {
    pub name: String,
    pub kind: DimensionKind,
    pub domain: Domain,
    /// Number of points with a missing value in this column.
    pub missing: usize,
}

impl Dimension {
    fn from_column(name: &str, column: &[Value]) -> Dimension {
        let kind = infer_kind(column);
        Dimension::with_kind(name, kind, column)
    }

    fn with_kind(name: &str, kind: DimensionKind, column: &[Value]) -> Dimension {
        let missing = column.iter().filter(|v| v.is_missing()).count();
        let domain = match kind {
            DimensionKind::Quantitative => {
                let (min, max) = column
                    .iter()
                    .filter_map(Value::as_number)
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                if min > max {
                    Domain::Range { min: 0.0, max: 0.0 }
                } else {
                    Domain::Range { min, max }
                }
            }
            DimensionKind::Ordinal if column.iter().all(|v| !matches!(v, Value::Text(_))) => {
                let mut values = distinct(column);
                values.sort_by(|a, b| a.as_number().unwrap_or(0.0).total_cmp(&b.as_number().unwrap_or(0.0)));
                Domain::Categories { values }
            }
            // Nominal, and non-numeric ordinals: first-appearance order.
            _ => Domain::Categories {
                values: distinct(column),
            },
        };
        Dimension {
            name: name.to_string(),
            kind,
            domain,
            missing,
        }
    }

    /// Position of `value` in a categorical domain.
    pub fn category_index(&self, value: &Value) -> Option<usize> {
        match &self.domain {
            Domain::Categories { values } => values.iter().position(|v| v == value),
            Domain::Range { .. } => None,
        }
    }
}

fn distinct(column: &[Value]) -> Vec<Value> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for v in column.iter().filter(|v| !v.is_missing()) {
        let key = match v {
            Value::Number(n) => format!("n:{}", n.to_bits()),
            other => format!("t:{}", other.label()),
        };
        if seen.insert(key) {
            out.push(v.clone());
        }
    }
    out
}

/// Classifies a column: any text makes it nominal, a handful of distinct
/// integers makes it ordinal, any other numeric column is quantitative.
/// Missing cells are ignored; an all-missing column is nominal.
pub fn infer_kind(column: &[Value]) -> DimensionKind {
    let mut numbers = Vec::new();
    for v in column {
        match v {
            Value::Text(_) => return DimensionKind::Nominal,
            Value::Number(n) => numbers.push(*n),
            Value::Missing => {}
        }
    }
    if numbers.is_empty() {
        return DimensionKind::Nominal;
    }
    if numbers.iter().all(|n| n.fract() == 0.0) {
        let distinct: HashSet<u64> = numbers.iter().map(|n| n.to_bits()).collect();
        if distinct.len() <= ORDINAL_MAX_DISTINCT {
            return DimensionKind::Ordinal;
        }
    }
    DimensionKind::Quantitative
}

/// Immutable table of points with a fixed schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dimensions: Vec<Dimension>,
    points: Vec<DataPoint>,
}

impl Dataset {
    /// Builds a dataset from column names and row-major values. Ids are the
    /// row indices. Rows must have one value per column.
    pub fn from_rows(columns: Vec<String>, rows: Vec<Vec<Value>>) -> Result<Dataset, ModelError> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(ModelError::Schema {
                    row: i,
                    message: format!("expected {} fields, found {}", columns.len(), row.len()),
                });
            }
        }
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.as_str()) {
                return Err(ModelError::Schema {
                    row: 0,
                    message: format!("duplicate column `{c}`"),
                });
            }
        }
        let dimensions = columns
            .iter()
            .enumerate()
            .map(|(c, name)| {
                let column: Vec<Value> = rows.iter().map(|r| r[c].clone()).collect();
                Dimension::from_column(name, &column)
            })
            .collect();
        let points = rows
            .into_iter()
            .enumerate()
            .map(|(id, values)| DataPoint { id, values })
            .collect();
        Ok(Dataset { dimensions, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    pub fn column_index(&self, name: &str) -> Result<usize, ModelError> {
        self.dimensions
            .iter()
            .position(|d| d.name == name)
            .ok_or_else(|| ModelError::UnknownDimension(name.to_string()))
    }

    pub fn dimension(&self, name: &str) -> Result<&Dimension, ModelError> {
        Ok(&self.dimensions[self.column_index(name)?])
    }

    pub fn value(&self, id: PointId, column: usize) -> &Value {
        &self.points[id].values[column]
    }

    pub fn column(&self, column: usize) -> impl Iterator<Item = &Value> + '_ {
        self.points.iter().map(move |p| &p.values[column])
    }

    /// Returns a copy with `name` reinterpreted as `kind`. Quantitative
    /// requires an all-numeric column.
    pub fn with_kind(&self, name: &str, kind: DimensionKind) -> Result<Dataset, ModelError> {
        let c = self.column_index(name)?;
        let column: Vec<Value> = self.column(c).cloned().collect();
        if kind == DimensionKind::Quantitative && column.iter().any(|v| matches!(v, Value::Text(_))) {
            return Err(ModelError::InvalidOverride {
                name: name.to_string(),
                message: "quantitative requires numeric values".into(),
            });
        }
        let mut out = self.clone();
        out.dimensions[c] = Dimension::with_kind(name, kind, &column);
        Ok(out)
    }

    /// Returns a copy with an explicit category order for `name`. The order
    /// must be a permutation of the observed category labels.
    pub fn with_order(&self, name: &str, order: &[String]) -> Result<Dataset, ModelError> {
        let c = self.column_index(name)?;
        let dim = &self.dimensions[c];
        let Domain::Categories { values } = &dim.domain else {
            return Err(ModelError::InvalidOverride {
                name: name.to_string(),
                message: "explicit order requires a categorical dimension".into(),
            });
        };
        let reordered = permute_by_label(values, order).ok_or_else(|| ModelError::InvalidOverride {
            name: name.to_string(),
            message: "order must list every category exactly once".into(),
        })?;
        let mut out = self.clone();
        out.dimensions[c].domain = Domain::Categories { values: reordered };
        Ok(out)
    }
}

pub(crate) fn permute_by_label<T: Clone + Labeled>(items: &[T], order: &[String]) -> Option<Vec<T>> {
    if order.len() != items.len() {
        return None;
    }
    let mut used = vec![false; items.len()];
    let mut out = Vec::with_capacity(items.len());
    for label in order {
        let i = items
            .iter()
            .enumerate()
            .position(|(i, it)| !used[i] && it.label_text() == *label)?;
        used[i] = true;
        out.push(items[i].clone());
    }
    Some(out)
}

pub(crate) trait Labeled {
    fn label_text(&self) -> String;
}

impl Labeled for Value {
    fn label_text(&self) -> String {
        self.label()
    }
}

/// One labeled record: `(column label, raw text)` pairs.
pub type Record = Vec<(String, String)>;

/// Builds a dataset from labeled text records. Column order follows the first
/// record; every record must carry exactly the same label set.
pub fn ingest_table<I>(rows: I) -> Result<Dataset, ModelError>
where
    I: IntoIterator<Item = Record>,
{
    let mut rows = rows.into_iter();
    let first = rows.next().ok_or(ModelError::EmptyInput)?;
    let columns: Vec<String> = first.iter().map(|(k, _)| k.clone()).collect();
    let mut table = vec![to_values(&columns, first, 0)?];
    for (i, rec) in rows.enumerate() {
        table.push(to_values(&columns, rec, i + 1)?);
    }
    Dataset::from_rows(columns, table)
}

fn to_values(columns: &[String], record: Record, row: usize) -> Result<Vec<Value>, ModelError> {
    if record.len() != columns.len() {
        return Err(ModelError::Schema {
            row,
            message: format!("expected {} fields, found {}", columns.len(), record.len()),
        });
    }
    let mut values = vec![None; columns.len()];
    for (label, raw) in record {
        let Some(c) = columns.iter().position(|k| *k == label) else {
            return Err(ModelError::Schema {
                row,
                message: format!("unexpected column `{label}`"),
            });
        };
        if values[c].is_some() {
            return Err(ModelError::Schema {
                row,
                message: format!("column `{label}` repeated"),
            });
        }
        values[c] = Some(Value::parse(&raw));
    }
    Ok(values.into_iter().map(|v| v.unwrap_or(Value::Missing)).collect())
}

/// Reads comma-separated UTF-8 text with a header row.
pub fn read_csv<R: Read>(reader: R) -> Result<Dataset, ModelError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| ModelError::Csv(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut records = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| ModelError::Csv(e.to_string()))?;
        if rec.len() != header.len() {
            return Err(ModelError::Schema {
                // Header is line 1.
                row: i + 2,
                message: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        records.push(
            header
                .iter()
                .cloned()
                .zip(rec.iter().map(str::to_string))
                .collect::<Record>(),
        );
    }
    if header.iter().all(String::is_empty) && records.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    ingest_table(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(pairs: &[(&str, &str)]) -> Record {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn ids_follow_row_order() {
        let ds = read_csv("mpg,origin\n18,USA\n26,Europe\n31,Japan\n".as_bytes()).unwrap();
        assert_eq!(ds.len(), 3);
        let ids: Vec<_> = ds.points().iter().map(|p| p.id).collect();
        assert_eq!(ids, vec![0, 1, 2]);
        assert_eq!(ds.value(1, 1), &Value::Text("Europe".into()));
        assert_eq!(ds.value(2, 0), &Value::Number(31.0));
    }

    #[test]
    fn empty_field_is_missing_and_tallied() {
        let ds = read_csv("mpg,origin\n,USA\n26,Europe\n".as_bytes()).unwrap();
        assert!(ds.value(0, 0).is_missing());
        assert_eq!(ds.dimension("mpg").unwrap().missing, 1);
    }

    #[test]
    fn mismatched_labels_are_schema_errors() {
        let err = ingest_table(vec![
            rec(&[("mpg", "1"), ("origin", "USA")]),
            rec(&[("mpg", "2"), ("cylinders", "4")]),
        ])
        .unwrap_err();
        assert!(matches!(err, ModelError::Schema { row: 1, .. }));

        let err = read_csv("a,b\n1,2\n3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, ModelError::Schema { row: 3, .. }), "{err:?}");
    }

    #[test]
    fn label_order_may_differ_between_records() {
        let ds = ingest_table(vec![rec(&[("a", "1"), ("b", "x")]), rec(&[("b", "y"), ("a", "2")])]).unwrap();
        assert_eq!(ds.value(1, 0), &Value::Number(2.0));
    }

    #[test]
    fn zero_rows_is_empty_input() {
        assert_eq!(ingest_table(Vec::<Record>::new()), Err(ModelError::EmptyInput));
        assert_eq!(read_csv("a,b\n".as_bytes()), Err(ModelError::EmptyInput));
    }

    #[test]
    fn kind_inference_rules() {
        let text: Vec<Value> = ["USA", "Europe", "Japan", "USA"]
            .iter()
            .map(|s| Value::parse(s))
            .collect();
        assert_eq!(infer_kind(&text), DimensionKind::Nominal);

        let cyl: Vec<Value> = [3, 4, 5, 6, 8, 4, 4].iter().map(|&v| Value::Number(v as f64)).collect();
        assert_eq!(infer_kind(&cyl), DimensionKind::Ordinal);

        let weights: Vec<Value> = (0..398).map(|i| Value::Number(1613.0 + i as f64 * 7.25)).collect();
        assert_eq!(infer_kind(&weights), DimensionKind::Quantitative);

        assert_eq!(infer_kind(&[Value::Missing, Value::Missing]), DimensionKind::Nominal);
    }

    #[test]
    fn ordinal_threshold_is_inclusive() {
        let twelve: Vec<Value> = (0..12).map(|i| Value::Number(i as f64)).collect();
        assert_eq!(infer_kind(&twelve), DimensionKind::Ordinal);
        let thirteen: Vec<Value> = (0..13).map(|i| Value::Number(i as f64)).collect();
        assert_eq!(infer_kind(&thirteen), DimensionKind::Quantitative);
    }

    #[test]
    fn non_decimal_words_stay_text() {
        assert_eq!(Value::parse("inf"), Value::Text("inf".into()));
        assert_eq!(Value::parse("NaN"), Value::Text("NaN".into()));
        assert_eq!(Value::parse(" 2.5 "), Value::Number(2.5));
        assert_eq!(Value::parse("1,5"), Value::Text("1,5".into()));
    }

    #[test]
    fn ordinal_domain_sorted_numerically() {
        let ds = read_csv("cyl\n8\n4\n6\n4\n".as_bytes()).unwrap();
        let dim = ds.dimension("cyl").unwrap();
        assert_eq!(dim.kind, DimensionKind::Ordinal);
        let Domain::Categories { values } = &dim.domain else {
            panic!()
        };
        let labels: Vec<_> = values.iter().map(Value::label).collect();
        assert_eq!(labels, ["4", "6", "8"]);
    }

    #[test]
    fn explicit_order_override() {
        let ds = read_csv("size\nsmall\nlarge\nmedium\n".as_bytes()).unwrap();
        let ds = ds
            .with_kind("size", DimensionKind::Ordinal)
            .unwrap()
            .with_order("size", &["small".into(), "medium".into(), "large".into()])
            .unwrap();
        let Domain::Categories { values } = &ds.dimension("size").unwrap().domain else {
            panic!()
        };
        assert_eq!(values[1], Value::Text("medium".into()));
        assert!(ds.with_order("size", &["small".into()]).is_err());
    }
}
