use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::data::Dataset;

use super::{check_family, require_continuous, FamilyKey, FamilyScore, Fitted, ScoreError, Scorer};

/// How one discrete-parent configuration was scored.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionFit {
    /// The continuous family fitted on the partition's rows.
    Conditional(Box<FamilyScore>),
    /// Too few rows for the conditional fit: the child alone.
    Marginal(Box<FamilyScore>),
    /// Too few rows for any fit: standard-normal density of the
    /// (standardized) child.
    StandardNormal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub config: Vec<usize>,
    pub rows: usize,
    pub fit: PartitionFit,
}

impl PartitionFit {
    pub fn log_score(&self, data: &Dataset, child: usize, rows: &[usize]) -> f64 {
        match self {
            PartitionFit::Conditional(s) | PartitionFit::Marginal(s) => s.log_score,
            PartitionFit::StandardNormal => rows.iter().map(|&r| standard_normal_log_density(data.value(r, child))).sum(),
        }
    }

    fn penalty(&self) -> f64 {
        match self {
            PartitionFit::Conditional(s) | PartitionFit::Marginal(s) => s.penalty_applied,
            PartitionFit::StandardNormal => 0.0,
        }
    }
}

pub(crate) fn standard_normal_log_density(x: f64) -> f64 {
    -0.5 * (2.0 * PI).ln() - 0.5 * x * x
}

/// Rows grouped by the joint value of `discrete` parents, in sorted
/// configuration order.
pub(crate) fn partition_rows(data: &Dataset, discrete: &[usize], rows: &[usize]) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for &r in rows {
        let config = discrete.iter().map(|&p| data.value(r, p) as usize).collect();
        groups.entry(config).or_default().push(r);
    }
    groups
}

pub(crate) fn hybrid_rows(
    child: usize,
    continuous: &[usize],
    discrete: &[usize],
    data: &Dataset,
    rows: &[usize],
    scorer: &dyn Scorer,
    min_samples: usize,
) -> Result<FamilyScore, ScoreError> {
    let inner = FamilyKey::new(child, continuous.iter().copied())?;
    if discrete.is_empty() {
        return scorer.score_rows(&inner, data, rows);
    }
    let key = FamilyKey::new(child, continuous.iter().chain(discrete).copied())?;
    check_family(&key, data)?;
    require_continuous(data, std::iter::once(child).chain(continuous.iter().copied()))?;
    if let Some(&p) = discrete.iter().find(|&&p| !data.kind(p).is_discrete()) {
        return Err(ScoreError::NotDiscrete(p));
    }
    let mut discrete_sorted = discrete.to_vec();
    discrete_sorted.sort_unstable();

    let mut partitions = Vec::new();
    let mut total = 0.0;
    let mut penalty = 0.0;
    for (config, part) in partition_rows(data, &discrete_sorted, rows) {
        let fit = if part.len() >= min_samples {
            PartitionFit::Conditional(Box::new(scorer.score_rows(&inner, data, &part)?))
        } else {
            match scorer.score_rows(&FamilyKey::empty(child), data, &part) {
                Ok(s) => PartitionFit::Marginal(Box::new(s)),
                Err(e) => {
                    log::debug!("family {key}, configuration {config:?}: {e}; using standard normal");
                    PartitionFit::StandardNormal
                }
            }
        };
        total += fit.log_score(data, child, &part);
        penalty += fit.penalty();
        partitions.push(Partition { config, rows: part.len(), fit });
    }
    Ok(FamilyScore {
        key,
        log_score: total,
        fitted: Fitted::Hybrid { discrete_parents: discrete_sorted, partitions },
        penalty_applied: penalty,
        scorer_id: scorer.id(),
    })
}

/// Sums the continuous `scorer` over the row partitions induced by the
/// discrete parents. Partitions with fewer than `min_samples` rows
/// contribute the child's marginal score instead.
pub fn hybrid_family_score(
    child: usize,
    continuous_parents: &[usize],
    discrete_parents: &[usize],
    data: &Dataset,
    scorer: &dyn Scorer,
    min_samples: usize,
) -> Result<FamilyScore, ScoreError> {
    hybrid_rows(child, continuous_parents, discrete_parents, data, &data.all_rows(), scorer, min_samples)
}
