use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::{Column, ColumnKind, DataError, Dataset};

/// Integer-valued columns with at most this many distinct values are read as
/// discrete unless a hint says otherwise.
pub const MAX_INFERRED_LEVELS: usize = 12;

/// Per-column type declaration overriding inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaHint {
    Continuous,
    Discrete(usize),
}

impl FromStr for SchemaHint {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "continuous" {
            return Ok(SchemaHint::Continuous);
        }
        t.strip_prefix("discrete:")
            .and_then(|a| a.trim().parse::<usize>().ok())
            .filter(|&a| a > 0)
            .map(SchemaHint::Discrete)
            .ok_or_else(|| DataError::InvalidHint(s.to_string()))
    }
}

impl fmt::Display for SchemaHint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaHint::Continuous => write!(f, "continuous"),
            SchemaHint::Discrete(a) => write!(f, "discrete:{a}"),
        }
    }
}

struct RawColumn {
    name: String,
    cells: Vec<String>,
    lines: Vec<u64>,
}

impl RawColumn {
    fn numbers(&self) -> Result<Vec<f64>, DataError> {
        self.cells
            .iter()
            .zip(&self.lines)
            .map(|(c, &line)| {
                c.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| DataError::Unparseable {
                    line,
                    column: self.name.clone(),
                    cell: c.clone(),
                })
            })
            .collect()
    }
}

fn discrete_from_numbers(name: &str, values: &[f64], arity: Option<usize>) -> Result<(Column, Vec<f64>), DataError> {
    if let Some(k) = arity {
        if values.iter().all(|v| v.fract() == 0.0 && *v >= 0.0 && *v < k as f64) {
            return Ok((Column::discrete(name, k), values.to_vec()));
        }
    }
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let labels: Vec<String> = distinct.iter().map(|v| v.to_string()).collect();
    let index: Vec<f64> = values
        .iter()
        .map(|v| distinct.binary_search_by(|d| d.total_cmp(v)).expect("level present") as f64)
        .collect();
    finish_discrete(name, labels, index, arity)
}

fn finish_discrete(
    name: &str,
    mut labels: Vec<String>,
    index: Vec<f64>,
    arity: Option<usize>,
) -> Result<(Column, Vec<f64>), DataError> {
    let k = arity.unwrap_or(labels.len());
    if labels.len() > k {
        return Err(DataError::ArityExceeded { column: name.to_string(), levels: labels.len(), arity: k });
    }
    // unobserved levels of a hinted arity get placeholder labels
    while labels.len() < k {
        labels.push(format!("level{}", labels.len()));
    }
    let column = Column { name: name.to_string(), kind: ColumnKind::Discrete { arity: k }, levels: labels };
    Ok((column, index))
}

fn type_column(raw: &RawColumn, hint: Option<SchemaHint>) -> Result<(Column, Vec<f64>), DataError> {
    match hint {
        Some(SchemaHint::Continuous) => Ok((Column::continuous(&raw.name), raw.numbers()?)),
        Some(SchemaHint::Discrete(k)) => match raw.numbers() {
            Ok(v) if v.iter().all(|x| x.fract() == 0.0) => discrete_from_numbers(&raw.name, &v, Some(k)),
            _ => {
                // text categories, labelled in sorted order
                let labels: Vec<String> =
                    raw.cells.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
                let index = raw.cells.iter().map(|c| labels.binary_search(c).expect("label present") as f64).collect();
                finish_discrete(&raw.name, labels, index, Some(k))
            }
        },
        None => {
            let v = raw.numbers()?;
            let integral = v.iter().all(|x| x.fract() == 0.0);
            let distinct: BTreeSet<u64> = v.iter().map(|x| x.to_bits()).collect();
            if integral && distinct.len() <= MAX_INFERRED_LEVELS {
                discrete_from_numbers(&raw.name, &v, None)
            } else {
                Ok((Column::continuous(&raw.name), v))
            }
        }
    }
}

/// Reads a comma-separated file with a header row. Column kinds come from
/// `hints` where given, otherwise integer-valued columns with at most
/// [`MAX_INFERRED_LEVELS`] distinct values are discrete. Empty and `NA`
/// cells are rejected.
pub fn load_delimited(path: &Path, hints: &BTreeMap<String, SchemaHint>) -> Result<Dataset, DataError> {
    let io_err = |e: &dyn fmt::Display| DataError::Io { path: path.display().to_string(), message: e.to_string() };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| io_err(&e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::Malformed { line: 1, message: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(DataError::Empty);
    }
    for name in hints.keys() {
        if !header.contains(name) {
            return Err(DataError::UnknownColumn(name.clone()));
        }
    }
    let mut raw: Vec<RawColumn> =
        header.iter().map(|n| RawColumn { name: n.clone(), cells: Vec::new(), lines: Vec::new() }).collect();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            DataError::Malformed { line, message: e.to_string() }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(DataError::Ragged { line, expected: header.len(), found: record.len() });
        }
        for (j, cell) in record.iter().enumerate() {
            if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
                return Err(DataError::MissingValue { line, column: header[j].clone() });
            }
            raw[j].cells.push(cell.to_string());
            raw[j].lines.push(line);
        }
    }
    let m = raw[0].cells.len();
    if m == 0 {
        return Err(DataError::Empty);
    }
    let mut columns = Vec::with_capacity(raw.len());
    let mut values = DMatrix::zeros(m, raw.len());
    for (j, r) in raw.iter().enumerate() {
        let (column, v) = type_column(r, hints.get(&r.name).copied())?;
        values.column_mut(j).copy_from_slice(&v);
        columns.push(column);
    }
    Dataset::new(columns, values)
}

/// Writes `dataset` in the format read by [`load_delimited`]. Continuous
/// values use the shortest representation that parses back exactly;
/// discrete cells are written as their level labels.
pub fn write_delimited(dataset: &Dataset, path: &Path) -> Result<(), DataError> {
    let io_err = |e: &dyn fmt::Display| DataError::Io { path: path.display().to_string(), message: e.to_string() };
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(&e))?;
    w.write_record(dataset.columns().iter().map(|c| c.name.as_str())).map_err(|e| io_err(&e))?;
    for i in 0..dataset.n_rows() {
        let row: Vec<String> = dataset
            .columns()
            .iter()
            .enumerate()
            .map(|(j, c)| match c.kind {
                ColumnKind::Continuous => dataset.value(i, j).to_string(),
                ColumnKind::Discrete { .. } => c.levels[dataset.value(i, j) as usize].clone(),
            })
            .collect();
        w.write_record(&row).map_err(|e| io_err(&e))?;
    }
    w.flush().map_err(|e| io_err(&e))
}
