use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::DataError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Continuous,
    Discrete { arity: usize },
}

impl ColumnKind {
    pub fn is_discrete(self) -> bool {
        matches!(self, ColumnKind::Discrete { .. })
    }

    pub fn arity(self) -> Option<usize> {
        match self {
            ColumnKind::Discrete { arity } => Some(arity),
            ColumnKind::Continuous => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    /// Text label of each discrete level (cell value `i` is `levels[i]`).
    /// Empty for continuous columns.
    pub levels: Vec<String>,
}

impl Column {
    pub fn continuous(name: impl Into<String>) -> Self {
        Column { name: name.into(), kind: ColumnKind::Continuous, levels: Vec::new() }
    }

    /// Discrete column whose levels are labelled `0..arity`.
    pub fn discrete(name: impl Into<String>, arity: usize) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Discrete { arity },
            levels: (0..arity).map(|i| i.to_string()).collect(),
        }
    }
}

/// A fully observed `M x n` sample matrix with typed columns. Discrete cells
/// hold level indices `0..arity` stored as `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Column>,
    values: DMatrix<f64>,
}

impl Dataset {
    pub fn new(columns: Vec<Column>, values: DMatrix<f64>) -> Result<Self, DataError> {
        if columns.len() != values.ncols() {
            return Err(DataError::Invalid(format!(
                "{} columns declared, matrix has {}",
                columns.len(),
                values.ncols()
            )));
        }
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(DataError::DuplicateColumn(c.name.clone()));
            }
            let col = values.column(i);
            match c.kind {
                ColumnKind::Continuous => {
                    if col.iter().any(|v| !v.is_finite()) {
                        return Err(DataError::Invalid(format!("non-finite value in '{}'", c.name)));
                    }
                }
                ColumnKind::Discrete { arity } => {
                    if arity == 0 || c.levels.len() != arity {
                        return Err(DataError::Invalid(format!(
                            "column '{}' needs {arity} level labels, has {}",
                            c.name,
                            c.levels.len()
                        )));
                    }
                    if let Some(v) = col.iter().find(|v| v.fract() != 0.0 || **v < 0.0 || **v >= arity as f64) {
                        return Err(DataError::Invalid(format!(
                            "value {v} in '{}' is not a level index below {arity}",
                            c.name
                        )));
                    }
                }
            }
        }
        Ok(Dataset { columns, values })
    }

    /// All-continuous dataset from named columns.
    pub fn continuous(names: &[&str], values: DMatrix<f64>) -> Result<Self, DataError> {
        Dataset::new(names.iter().map(|n| Column::continuous(*n)).collect(), values)
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Column {
        &self.columns[j]
    }

    pub fn kind(&self, j: usize) -> ColumnKind {
        self.columns[j].kind
    }

    pub fn name(&self, j: usize) -> &str {
        &self.columns[j].name
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[(row, col)]
    }

    pub fn column_vector(&self, j: usize) -> DVector<f64> {
        self.values.column(j).into_owned()
    }

    /// Targets of `child` restricted to `rows`.
    pub fn targets(&self, child: usize, rows: &[usize]) -> DVector<f64> {
        DVector::from_iterator(rows.len(), rows.iter().map(|&r| self.values[(r, child)]))
    }

    /// `rows.len() x parents.len()` input matrix.
    pub fn inputs(&self, parents: &[usize], rows: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), parents.len(), |i, d| self.values[(rows[i], parents[d])])
    }

    pub fn all_rows(&self) -> Vec<usize> {
        (0..self.n_rows()).collect()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let values = DMatrix::from_fn(rows.len(), self.n_cols(), |i, j| self.values[(rows[i], j)]);
        Dataset { columns: self.columns.clone(), values }
    }

    /// Same schema, different values (validated).
    pub fn with_values(&self, values: DMatrix<f64>) -> Result<Dataset, DataError> {
        Dataset::new(self.columns.clone(), values)
    }

    pub fn has_discrete(&self) -> bool {
        self.columns.iter().any(|c| c.kind.is_discrete())
    }
}
