use crate::data::Dataset;
use crate::gp::optimize_hyperparameters;

use super::{check_family, require_continuous, FamilyKey, FamilyScore, Fitted, ScoreConfig, ScoreError, Scorer, ScorerId};

/// GP family score: the MAP log posterior of the hyperparameters minus
/// `(K/2) ln M`, with `K` the number of free hyperparameters.
#[derive(Debug, Clone, Default)]
pub struct GpScorer {
    config: ScoreConfig,
}

impl GpScorer {
    pub fn new(config: ScoreConfig) -> Self {
        GpScorer { config }
    }
}

impl Scorer for GpScorer {
    fn id(&self) -> ScorerId {
        ScorerId::Gp
    }

    fn score_rows(&self, key: &FamilyKey, data: &Dataset, rows: &[usize]) -> Result<FamilyScore, ScoreError> {
        check_family(key, data)?;
        require_continuous(data, std::iter::once(key.child).chain(key.parents.iter().copied()))?;
        let m = rows.len();
        let required = self.config.min_samples.max(2);
        if m < required {
            return Err(ScoreError::TooFewSamples { family: key.clone(), required, found: m });
        }
        let targets = data.targets(key.child, rows);
        let inputs = data.inputs(&key.parents, rows);
        let fit = optimize_hyperparameters(&targets, &inputs, &self.config.gp)?;
        let k = fit.hyperparameters.free_parameter_count() as f64;
        let penalty = 0.5 * k * (m as f64).ln();
        let log_score = fit.log_posterior - penalty;
        if !log_score.is_finite() {
            return Err(ScoreError::NonFinite(key.clone()));
        }
        Ok(FamilyScore {
            key: key.clone(),
            log_score,
            fitted: Fitted::Gp(fit.hyperparameters),
            penalty_applied: penalty,
            scorer_id: ScorerId::Gp,
        })
    }
}

pub fn gp_family_score(key: &FamilyKey, data: &Dataset, config: &ScoreConfig) -> Result<FamilyScore, ScoreError> {
    GpScorer::new(config.clone()).score_family(key, data)
}
