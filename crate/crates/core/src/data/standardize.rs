use serde::{Deserialize, Serialize};

use super::{ColumnKind, DataError, Dataset};

/// Per-column location and scale; `None` for discrete columns, which are
/// left untouched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub columns: Vec<Option<(f64, f64)>>,
}

impl Standardization {
    /// Maps every continuous column to `(x - mean) / sd`.
    pub fn apply(&self, data: &Dataset) -> Result<Dataset, DataError> {
        self.map(data, |x, mean, sd| (x - mean) / sd)
    }

    pub fn invert(&self, data: &Dataset) -> Result<Dataset, DataError> {
        self.map(data, |z, mean, sd| z * sd + mean)
    }

    fn map(&self, data: &Dataset, f: impl Fn(f64, f64, f64) -> f64) -> Result<Dataset, DataError> {
        if self.columns.len() != data.n_cols() {
            return Err(DataError::Invalid(format!(
                "standardization has {} columns, dataset {}",
                self.columns.len(),
                data.n_cols()
            )));
        }
        let mut values = data.values().clone();
        for (j, stats) in self.columns.iter().enumerate() {
            match (stats, data.kind(j)) {
                (Some((mean, sd)), ColumnKind::Continuous) => {
                    values.column_mut(j).iter_mut().for_each(|v| *v = f(*v, *mean, *sd));
                }
                (None, ColumnKind::Discrete { .. }) => {}
                _ => return Err(DataError::Invalid(format!("column '{}' changed kind", data.name(j)))),
            }
        }
        data.with_values(values)
    }
}

/// Fits mean and population standard deviation of each continuous column on
/// `fit_rows` and transforms the whole dataset with them.
pub fn standardize(data: &Dataset, fit_rows: &[usize]) -> Result<(Dataset, Standardization), DataError> {
    if fit_rows.is_empty() {
        return Err(DataError::Invalid("no rows to fit standardization on".into()));
    }
    if let Some(&r) = fit_rows.iter().find(|&&r| r >= data.n_rows()) {
        return Err(DataError::Invalid(format!("fit row {r} out of range")));
    }
    let n = fit_rows.len() as f64;
    let mut columns = Vec::with_capacity(data.n_cols());
    for j in 0..data.n_cols() {
        if data.kind(j).is_discrete() {
            columns.push(None);
            continue;
        }
        let mean = fit_rows.iter().map(|&r| data.value(r, j)).sum::<f64>() / n;
        let var = fit_rows.iter().map(|&r| (data.value(r, j) - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        if !(sd > 1e-12 * mean.abs().max(1.0)) {
            return Err(DataError::ConstantColumn { column: data.name(j).to_string() });
        }
        columns.push(Some((mean, sd)));
    }
    let s = Standardization { columns };
    Ok((s.apply(data)?, s))
}
