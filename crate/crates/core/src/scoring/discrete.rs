use std::collections::BTreeMap;

use statrs::function::gamma::ln_gamma;

use crate::data::Dataset;

use super::{check_family, FamilyKey, FamilyScore, Fitted, ScoreConfig, ScoreError, Scorer, ScorerId};

/// Child-level counts for each observed parent configuration.
pub(crate) fn counts(key: &FamilyKey, data: &Dataset, rows: &[usize], arity: usize) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut table: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for &r in rows {
        let config: Vec<usize> = key.parents.iter().map(|&p| data.value(r, p) as usize).collect();
        table.entry(config).or_insert_with(|| vec![0; arity])[data.value(r, key.child) as usize] += 1;
    }
    table
}

/// Dirichlet-multinomial log marginal likelihood of one configuration's
/// counts under a symmetric prior.
pub(crate) fn dirichlet_multinomial(counts: &[usize], alpha: f64) -> f64 {
    let r = counts.len() as f64;
    let n: usize = counts.iter().sum();
    ln_gamma(r * alpha) - ln_gamma(n as f64 + r * alpha)
        + counts.iter().map(|&c| ln_gamma(c as f64 + alpha) - ln_gamma(alpha)).sum::<f64>()
}

/// Multinomial child with discrete parents, symmetric Dirichlet prior per
/// parent configuration.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteScorer {
    alpha: f64,
}

impl DiscreteScorer {
    pub fn new(alpha: f64) -> Self {
        DiscreteScorer { alpha }
    }
}

impl Default for DiscreteScorer {
    fn default() -> Self {
        DiscreteScorer { alpha: 1.0 }
    }
}

pub(crate) fn require_discrete_family(key: &FamilyKey, data: &Dataset) -> Result<usize, ScoreError> {
    let arity = data.kind(key.child).arity().ok_or(ScoreError::NotDiscrete(key.child))?;
    if let Some(&p) = key.parents.iter().find(|&&p| !data.kind(p).is_discrete()) {
        return Err(ScoreError::ContinuousParentOfDiscrete { child: key.child, parent: p });
    }
    Ok(arity)
}

impl Scorer for DiscreteScorer {
    fn id(&self) -> ScorerId {
        ScorerId::Discrete
    }

    fn score_rows(&self, key: &FamilyKey, data: &Dataset, rows: &[usize]) -> Result<FamilyScore, ScoreError> {
        check_family(key, data)?;
        let arity = require_discrete_family(key, data)?;
        let log_score = counts(key, data, rows, arity).values().map(|c| dirichlet_multinomial(c, self.alpha)).sum();
        Ok(FamilyScore {
            key: key.clone(),
            log_score,
            fitted: Fitted::Discrete { alpha: self.alpha },
            penalty_applied: 0.0,
            scorer_id: ScorerId::Discrete,
        })
    }
}

pub fn discrete_family_score(key: &FamilyKey, data: &Dataset, config: &ScoreConfig) -> Result<FamilyScore, ScoreError> {
    DiscreteScorer::new(config.dirichlet_alpha).score_family(key, data)
}
