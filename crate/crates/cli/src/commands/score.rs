use gpnet::data::Dataset;
use gpnet::scoring::{FamilyKey, Scorer, ScorerId};
use serde::{Deserialize, Serialize};

use super::{column, load_standardized, scorer};
use crate::config::Settings;
use crate::error::{usage, CliError};
use crate::output::{csv_bytes, fingerprint, Output, Timings};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub scorer: String,
    pub child: String,
    /// Parent names joined by `;`.
    pub parents: String,
    pub samples: usize,
    pub log_score: f64,
    pub penalty: f64,
    /// Fitted parameters as JSON.
    pub fitted: String,
    pub fingerprint: String,
}

pub fn score_rows(data: &Dataset, child: &str, parents: &[String], scorers: &[ScorerId]) -> Result<Vec<ScoreRow>, CliError> {
    let c = column(data, child)?;
    let ps = parents.iter().map(|p| column(data, p)).collect::<Result<Vec<_>, _>>()?;
    let key = FamilyKey::new(c, ps).map_err(|e| usage(e.to_string()))?;
    let fp = fingerprint(data);
    scorers
        .iter()
        .map(|&id| {
            let s = scorer(id).score_family(&key, data).map_err(|e| CliError::Compute(format!("{child}: {e}")))?;
            Ok(ScoreRow {
                scorer: s.scorer_id.as_str().to_string(),
                child: child.to_string(),
                parents: key.parents.iter().map(|&p| data.name(p)).collect::<Vec<_>>().join(";"),
                samples: data.n_rows(),
                log_score: s.log_score,
                penalty: s.penalty_applied,
                fitted: serde_json::to_string(&s.fitted).map_err(|e| CliError::Compute(e.to_string()))?,
                fingerprint: fp.clone(),
            })
        })
        .collect()
}

pub fn run(settings: &Settings) -> Result<Output, CliError> {
    let mut timings = Timings::default();
    let (data, _) = timings.time("load", || load_standardized(settings))?;
    let parents = settings.parents.clone().unwrap_or_default();
    let scorers = settings.scorers(&[ScorerId::Gp])?;
    let rows = timings.time("score", || score_rows(&data, &settings.child()?, &parents, &scorers))?;
    Ok(Output { body: csv_bytes(&rows)?, timings })
}
