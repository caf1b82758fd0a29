use log::{debug, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{is_acyclic, legal_moves, random_dag, Dag, Move, SearchError};
use crate::data::Dataset;
use crate::scoring::{FamilyKey, FamilyScore, ScoreCache, ScoreError, Scorer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub max_parents: usize,
    /// A move is taken only if it gains more than this.
    pub epsilon: f64,
    /// Extra climbs from seeded random graphs; the best result is kept.
    pub restarts: usize,
    pub seed: u64,
    /// Edge probability of the random restart graphs.
    pub restart_edge_prob: f64,
    #[serde(skip)]
    pub start: Option<Dag>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_parents: 3, epsilon: 1e-9, restarts: 0, seed: 0, restart_edge_prob: 0.5, start: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    #[serde(rename = "move")]
    pub mv: Move,
    pub delta: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub initial_total: f64,
    pub entries: Vec<TraceEntry>,
}

impl SearchTrace {
    pub fn final_total(&self) -> f64 {
        self.entries.last().map_or(self.initial_total, |e| e.total)
    }
}

/// Discrete children may only have discrete parents.
pub fn arc_allowed(data: &Dataset, parent: usize, child: usize) -> bool {
    !(data.kind(child).is_discrete() && !data.kind(parent).is_discrete())
}

pub(crate) fn family_score(
    key: &FamilyKey,
    data: &Dataset,
    scorer: &dyn Scorer,
    cache: Option<&ScoreCache>,
) -> Result<FamilyScore, ScoreError> {
    match cache {
        Some(c) => c.get_or_compute(key, data, scorer),
        None => scorer.score_family(key, data),
    }
}

fn key_of(dag: &Dag, v: usize) -> FamilyKey {
    FamilyKey::new(v, dag.parents(v).iter().copied()).expect("dag has no self-loops")
}

fn check_graph(dag: &Dag, data: &Dataset) -> Result<(), SearchError> {
    if dag.n() != data.n_cols() {
        return Err(SearchError::SizeMismatch { expected: data.n_cols(), found: dag.n() });
    }
    if !is_acyclic(dag) {
        return Err(SearchError::InvalidGraph(format!("{dag} has a cycle")));
    }
    if let Some((p, c)) = dag.edges().into_iter().find(|&(p, c)| !arc_allowed(data, p, c)) {
        return Err(SearchError::InvalidGraph(format!(
            "continuous '{}' cannot be a parent of discrete '{}'",
            data.name(p),
            data.name(c)
        )));
    }
    Ok(())
}

fn family_scores(
    dag: &Dag,
    data: &Dataset,
    scorer: &dyn Scorer,
    cache: Option<&ScoreCache>,
) -> Result<Vec<f64>, SearchError> {
    (0..dag.n())
        .map(|v| {
            let key = key_of(dag, v);
            family_score(&key, data, scorer, cache)
                .map(|s| s.log_score)
                .map_err(|source| SearchError::Score { family: describe(&key, data), source })
        })
        .collect()
}

pub(crate) fn describe(key: &FamilyKey, data: &Dataset) -> String {
    let parents: Vec<&str> = key.parents.iter().map(|&p| data.name(p)).collect();
    format!("{} <- {{{}}}", data.name(key.child), parents.join(", "))
}

/// Sum of family scores under a uniform structure prior.
pub fn total_score(
    dag: &Dag,
    data: &Dataset,
    scorer: &dyn Scorer,
    cache: Option<&ScoreCache>,
) -> Result<f64, SearchError> {
    check_graph(dag, data)?;
    Ok(family_scores(dag, data, scorer, cache)?.iter().sum())
}

/// Score change of `mv` given the current per-family scores.
fn move_delta(
    dag: &Dag,
    mv: &Move,
    current: &[f64],
    data: &Dataset,
    scorer: &dyn Scorer,
    cache: Option<&ScoreCache>,
) -> Result<f64, ScoreError> {
    let after = mv.apply(dag);
    let mut delta = 0.0;
    for v in mv.touched() {
        delta += family_score(&key_of(&after, v), data, scorer, cache)?.log_score - current[v];
    }
    Ok(delta)
}

/// Highest-gain legal move, first in move order among ties. Moves whose
/// families cannot be scored are skipped.
pub fn best_move(
    dag: &Dag,
    data: &Dataset,
    scorer: &dyn Scorer,
    config: &SearchConfig,
    cache: Option<&ScoreCache>,
) -> Result<Option<(Move, f64)>, SearchError> {
    check_graph(dag, data)?;
    let current = family_scores(dag, data, scorer, cache)?;
    Ok(best_from(dag, &current, data, scorer, config, cache))
}

fn best_from(
    dag: &Dag,
    current: &[f64],
    data: &Dataset,
    scorer: &dyn Scorer,
    config: &SearchConfig,
    cache: Option<&ScoreCache>,
) -> Option<(Move, f64)> {
    let mut best: Option<(Move, f64)> = None;
    for mv in legal_moves(dag, config.max_parents, |p, c| arc_allowed(data, p, c)) {
        match move_delta(dag, &mv, current, data, scorer, cache) {
            Ok(delta) if best.is_none_or(|(_, b)| delta > b) => best = Some((mv, delta)),
            Ok(_) => {}
            Err(e) => warn!("skipping {mv}: {e}"),
        }
    }
    best
}

fn climb(
    start: Dag,
    data: &Dataset,
    scorer: &dyn Scorer,
    config: &SearchConfig,
    cache: Option<&ScoreCache>,
) -> Result<(Dag, SearchTrace), SearchError> {
    check_graph(&start, data)?;
    let mut dag = start;
    let mut current = family_scores(&dag, data, scorer, cache)?;
    let mut trace = SearchTrace { initial_total: current.iter().sum(), entries: Vec::new() };
    while let Some((mv, delta)) = best_from(&dag, &current, data, scorer, config, cache) {
        if delta <= config.epsilon {
            break;
        }
        dag = mv.apply(&dag);
        for v in mv.touched() {
            current[v] = family_score(&key_of(&dag, v), data, scorer, cache)
                .expect("family scored while evaluating the move")
                .log_score;
        }
        let total = current.iter().sum();
        debug!("{mv}: {delta:+.6} -> {total:.6}");
        trace.entries.push(TraceEntry { mv, delta, total });
    }
    Ok((dag, trace))
}

/// Greedy hill climbing over add/delete/reverse moves from the configured
/// start graph (empty by default), plus optional random restarts.
pub fn hill_climb(
    data: &Dataset,
    scorer: &dyn Scorer,
    config: &SearchConfig,
    cache: Option<&ScoreCache>,
) -> Result<(Dag, SearchTrace), SearchError> {
    let start = config.start.clone().unwrap_or_else(|| Dag::empty(data.n_cols()));
    let mut best = climb(start, data, scorer, config, cache)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for r in 0..config.restarts {
        let start = random_dag(
            data.n_cols(),
            config.restart_edge_prob,
            config.max_parents,
            |p, c| arc_allowed(data, p, c),
            &mut rng,
        );
        match climb(start, data, scorer, config, cache) {
            Ok(run) if run.1.final_total() > best.1.final_total() => best = run,
            Ok(_) => {}
            Err(e) => warn!("restart {r} abandoned: {e}"),
        }
    }
    Ok(best)
}
