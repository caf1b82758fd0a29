use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use gpnet::data::{load_delimited, split, standardize, Dataset, SchemaHint};
use gpnet::scoring::{family_test_log_loss, FamilyKey, ScoreCache, ScorerId};
use gpnet::search::{hill_climb, SearchConfig};
use serde::{Deserialize, Serialize};

use super::{format_edges, scorer};
use crate::config::Settings;
use crate::error::CliError;
use crate::output::{csv_bytes_with_header, derive_seed, fingerprint, Output, Timings};

pub const DEFAULT_SIZES: [usize; 4] = [20, 50, 100, 200];

#[derive(Debug, Clone)]
pub struct BenchmarkParams {
    pub inputs: Vec<PathBuf>,
    pub hints: BTreeMap<String, SchemaHint>,
    pub sizes: Vec<usize>,
    pub test_count: usize,
    pub seeds: Vec<u64>,
    pub scorers: Vec<ScorerId>,
    pub max_parents: usize,
    pub base_seed: u64,
}

impl BenchmarkParams {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        Ok(BenchmarkParams {
            inputs: s.inputs()?,
            hints: s.hints()?,
            sizes: s.sizes(&DEFAULT_SIZES)?,
            test_count: s.test_count(300)?,
            seeds: s.seeds.clone().map_or(Ok(vec![0]), |_| s.seeds())?,
            scorers: s.scorers(&ScorerId::CONTINUOUS)?,
            max_parents: s.max_parents()?,
            base_seed: s.seed(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub dataset: String,
    pub size: usize,
    pub seed: u64,
    pub permutation_seed: u64,
    pub test_count: usize,
    pub scorer: String,
    /// Mean over test rows of the joint log density under the learned
    /// network.
    pub test_log_likelihood: Option<f64>,
    pub edges: Option<usize>,
    pub learned: String,
    pub fingerprint: String,
    pub error: String,
}

pub const HEADER: [&str; 11] = [
    "dataset", "size", "seed", "permutation_seed", "test_count", "scorer", "test_log_likelihood", "edges", "learned",
    "fingerprint", "error",
];

fn dataset_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Learns on `train` and returns the summed per-family mean test log
/// densities.
pub fn evaluate(
    train: &Dataset,
    test: &Dataset,
    id: ScorerId,
    config: &SearchConfig,
    timings: &mut Timings,
) -> Result<(f64, Vec<(usize, usize)>), String> {
    let sc = scorer(id);
    let cache = ScoreCache::new();
    let (dag, _) = timings.time("search", || hill_climb(train, &sc, config, Some(&cache))).map_err(|e| e.to_string())?;
    timings.time("predict", || {
        let mut total = 0.0;
        for v in 0..train.n_cols() {
            let key = FamilyKey::new(v, dag.parents(v).iter().copied()).expect("acyclic graph");
            let s = cache.get_or_compute(&key, train, &sc).map_err(|e| format!("{key}: {e}"))?;
            total += family_test_log_loss(&s, train, test).map_err(|e| format!("{key}: {e}"))?;
        }
        Ok((total, dag.edges()))
    })
}

pub fn benchmark(p: &BenchmarkParams, timings: &mut Timings) -> Vec<BenchmarkRow> {
    let config = SearchConfig { max_parents: p.max_parents, ..SearchConfig::default() };
    let mut rows = Vec::new();
    for path in &p.inputs {
        let name = dataset_name(path);
        let blank = |size: usize, seed: u64, permutation_seed: u64, id: Option<ScorerId>| BenchmarkRow {
            dataset: name.clone(),
            size,
            seed,
            permutation_seed,
            test_count: p.test_count,
            scorer: id.map_or("", |i| i.as_str()).into(),
            test_log_likelihood: None,
            edges: None,
            learned: String::new(),
            fingerprint: String::new(),
            error: String::new(),
        };
        let data = match timings.time("load", || load_delimited(path, &p.hints)) {
            Ok(d) => d,
            Err(e) => {
                rows.push(BenchmarkRow { error: e.to_string(), ..blank(0, 0, 0, None) });
                continue;
            }
        };
        for &seed in &p.seeds {
            let perm_seed = derive_seed(&["benchmark", &p.base_seed.to_string(), &name, &seed.to_string()]);
            let (pool, test_raw) = match split(&data, p.test_count, perm_seed) {
                Ok(s) => s,
                Err(e) => {
                    rows.push(BenchmarkRow { error: e.to_string(), ..blank(0, seed, perm_seed, None) });
                    continue;
                }
            };
            for &size in &p.sizes {
                let prepared = if size > pool.n_rows() {
                    Err(format!("size {size} exceeds the {} training rows", pool.n_rows()))
                } else {
                    let rows: Vec<usize> = (0..size).collect();
                    standardize(&pool.select_rows(&rows), &rows)
                        .and_then(|(train, st)| Ok((train, st.apply(&test_raw)?)))
                        .map_err(|e| e.to_string())
                };
                for &id in &p.scorers {
                    let base = blank(size, seed, perm_seed, Some(id));
                    rows.push(match &prepared {
                        Err(e) => BenchmarkRow { error: e.clone(), ..base },
                        Ok((train, test)) => match evaluate(train, test, id, &config, timings) {
                            Ok((ll, edges)) => BenchmarkRow {
                                test_log_likelihood: Some(ll),
                                edges: Some(edges.len()),
                                learned: format_edges(train, &edges),
                                fingerprint: fingerprint(train),
                                ..base
                            },
                            Err(e) => BenchmarkRow { error: e, fingerprint: fingerprint(train), ..base },
                        },
                    });
                }
            }
        }
    }
    rows
}

pub fn run(settings: &Settings) -> Result<Output, CliError> {
    let params = BenchmarkParams::from_settings(settings)?;
    let mut timings = Timings::default();
    let rows = benchmark(&params, &mut timings);
    Ok(Output { body: csv_bytes_with_header(&rows, &HEADER)?, timings })
}
