use crate::data::Dataset;
use crate::gp::GpPosterior;

use super::discrete::counts;
use super::hybrid::{partition_rows, standard_normal_log_density};
use super::{FamilyScore, Fitted, KernelEstimator, PartitionFit, ScoreError};

/// Log predictive densities of the child at `test_rows`, using the fitted
/// family trained on `train_rows`.
fn log_densities(
    score: &FamilyScore,
    train: &Dataset,
    train_rows: &[usize],
    test: &Dataset,
    test_rows: &[usize],
) -> Result<Vec<f64>, ScoreError> {
    let key = &score.key;
    let parents_of = |r: usize| -> Vec<f64> { key.parents.iter().map(|&p| test.value(r, p)).collect() };
    match &score.fitted {
        Fitted::Gp(theta) => {
            let post = GpPosterior::fit(
                train.inputs(&key.parents, train_rows),
                train.targets(key.child, train_rows),
                theta.clone(),
            )?;
            test_rows
                .iter()
                .map(|&r| Ok(post.predict(&parents_of(r))?.log_density(test.value(r, key.child))))
                .collect()
        }
        Fitted::LinearGaussian(post) => {
            Ok(test_rows.iter().map(|&r| post.log_predictive(&parents_of(r), test.value(r, key.child))).collect())
        }
        Fitted::Kernel { bandwidth } => {
            let est = KernelEstimator::from_rows(train, key, train_rows, *bandwidth);
            Ok(test_rows.iter().map(|&r| est.log_conditional(test.value(r, key.child), &parents_of(r))).collect())
        }
        Fitted::Discrete { alpha } => {
            let arity = train.kind(key.child).arity().ok_or(ScoreError::NotDiscrete(key.child))?;
            let table = counts(key, train, train_rows, arity);
            Ok(test_rows
                .iter()
                .map(|&r| {
                    let config: Vec<usize> = key.parents.iter().map(|&p| test.value(r, p) as usize).collect();
                    let level = test.value(r, key.child) as usize;
                    let (n_k, n) = table.get(&config).map_or((0, 0), |c| (c[level], c.iter().sum()));
                    ((n_k as f64 + alpha) / (n as f64 + arity as f64 * alpha)).ln()
                })
                .collect())
        }
        Fitted::Hybrid { discrete_parents, partitions } => {
            let train_parts = partition_rows(train, discrete_parents, train_rows);
            let mut out = vec![0.0; test_rows.len()];
            let positions: Vec<usize> = (0..test_rows.len()).collect();
            let test_parts = partition_rows_indexed(test, discrete_parents, test_rows, &positions);
            for (config, (rows, idx)) in test_parts {
                let fit = partitions.iter().find(|p| p.config == config).map(|p| &p.fit);
                let values = match fit {
                    Some(PartitionFit::Conditional(s)) | Some(PartitionFit::Marginal(s)) => {
                        log_densities(s, train, &train_parts[&config], test, &rows)?
                    }
                    // unseen configuration or too small to fit
                    _ => rows.iter().map(|&r| standard_normal_log_density(test.value(r, key.child))).collect(),
                };
                for (i, v) in idx.into_iter().zip(values) {
                    out[i] = v;
                }
            }
            Ok(out)
        }
    }
}

fn partition_rows_indexed(
    data: &Dataset,
    discrete: &[usize],
    rows: &[usize],
    positions: &[usize],
) -> std::collections::BTreeMap<Vec<usize>, (Vec<usize>, Vec<usize>)> {
    let mut groups: std::collections::BTreeMap<Vec<usize>, (Vec<usize>, Vec<usize>)> = Default::default();
    for (&r, &i) in rows.iter().zip(positions) {
        let config = discrete.iter().map(|&p| data.value(r, p) as usize).collect();
        let g = groups.entry(config).or_default();
        g.0.push(r);
        g.1.push(i);
    }
    groups
}

/// Mean log predictive density of the family's child over the rows of
/// `test`, with the model trained on all rows of `train`. Both datasets must
/// share a schema and be on the same (training) standardization.
pub fn family_test_log_loss(fitted: &FamilyScore, train: &Dataset, test: &Dataset) -> Result<f64, ScoreError> {
    if train.n_cols() != test.n_cols()
        || train.columns().iter().zip(test.columns()).any(|(a, b)| a.name != b.name || a.kind != b.kind)
    {
        return Err(ScoreError::SchemaMismatch);
    }
    super::check_family(&fitted.key, train)?;
    if test.n_rows() == 0 {
        return Err(ScoreError::Degenerate("empty test set".into()));
    }
    let values = log_densities(fitted, train, &train.all_rows(), test, &test.all_rows())?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if mean.is_finite() {
        Ok(mean)
    } else {
        Err(ScoreError::NonFinite(fitted.key.clone()))
    }
}
