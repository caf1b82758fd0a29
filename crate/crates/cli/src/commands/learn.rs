use gpnet::data::{ColumnKind, Dataset};
use gpnet::scoring::{FamilyKey, Fitted, ScoreCache, Scorer, ScorerId};
use gpnet::search::{hill_climb, MoveKind, SearchConfig};
use serde::Serialize;

use super::{load_standardized, scorer};
use crate::config::Settings;
use crate::error::CliError;
use crate::output::{fingerprint, json_bytes, Output, Timings};

#[derive(Debug, Clone, Serialize)]
pub struct Variable {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct Edge {
    pub parent: String,
    pub child: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyRecord {
    pub child: String,
    pub parents: Vec<String>,
    pub scorer: ScorerId,
    pub log_score: f64,
    pub penalty: f64,
    pub fitted: Fitted,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    #[serde(rename = "move")]
    pub mv: String,
    pub delta: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LearnReport {
    pub command: &'static str,
    pub input: String,
    pub fingerprint: String,
    pub scorer: ScorerId,
    pub max_parents: usize,
    pub epsilon: f64,
    pub restarts: usize,
    pub seed: u64,
    pub variables: Vec<Variable>,
    pub edges: Vec<Edge>,
    pub total_score: f64,
    pub families: Vec<FamilyRecord>,
    pub initial_total: f64,
    pub trace: Vec<TraceRecord>,
}

/// Hill climbing on standardized data, with every family of the result.
pub fn learn(data: &Dataset, id: ScorerId, config: &SearchConfig, timings: &mut Timings) -> Result<LearnReport, CliError> {
    let scorer = scorer(id);
    let cache = ScoreCache::new();
    let (dag, trace) =
        timings.time("search", || hill_climb(data, &scorer, config, Some(&cache))).map_err(|e| CliError::Compute(e.to_string()))?;
    let name = |i: usize| data.name(i).to_string();
    let mut families = Vec::with_capacity(data.n_cols());
    for v in 0..data.n_cols() {
        let key = FamilyKey::new(v, dag.parents(v).iter().copied()).expect("acyclic graph");
        let s = cache.get_or_compute(&key, data, &scorer).map_err(|e| CliError::Compute(e.to_string()))?;
        families.push(FamilyRecord {
            child: name(v),
            parents: key.parents.iter().map(|&p| name(p)).collect(),
            scorer: s.scorer_id,
            log_score: s.log_score,
            penalty: s.penalty_applied,
            fitted: s.fitted,
        });
    }
    let describe = |(p, c): (usize, usize)| format!("{}->{}", name(p), name(c));
    Ok(LearnReport {
        command: "learn",
        input: String::new(),
        fingerprint: fingerprint(data),
        scorer: scorer.id(),
        max_parents: config.max_parents,
        epsilon: config.epsilon,
        restarts: config.restarts,
        seed: config.seed,
        variables: data.columns().iter().map(|c| Variable { name: c.name.clone(), kind: c.kind }).collect(),
        edges: dag.edges().into_iter().map(|(p, c)| Edge { parent: name(p), child: name(c) }).collect(),
        total_score: trace.final_total(),
        families,
        initial_total: trace.initial_total,
        trace: trace
            .entries
            .iter()
            .map(|e| {
                let verb = match e.mv.kind {
                    MoveKind::Add => "add",
                    MoveKind::Delete => "delete",
                    MoveKind::Reverse => "reverse",
                };
                TraceRecord { mv: format!("{verb} {}", describe((e.mv.parent, e.mv.child))), delta: e.delta, total: e.total }
            })
            .collect(),
    })
}

pub fn run(settings: &Settings) -> Result<Output, CliError> {
    let mut timings = Timings::default();
    let (data, _) = timings.time("load", || load_standardized(settings))?;
    let config = SearchConfig {
        max_parents: settings.max_parents()?,
        restarts: settings.restarts()?,
        seed: settings.seed(),
        ..SearchConfig::default()
    };
    let mut report = learn(&data, settings.scorer(ScorerId::Gp)?, &config, &mut timings)?;
    report.input = settings.input()?.display().to_string();
    Ok(Output { body: json_bytes(&report)?, timings })
}
