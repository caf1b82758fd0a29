use gpnet::scoring::{FamilyKey, ScorerId};
use serde::{Deserialize, Serialize};

use super::{score_and_loss, scorer, two_variable_cell};
use crate::config::{Generator, Settings};
use crate::error::CliError;
use crate::output::{csv_bytes_with_header, derive_seed, fingerprint, Output, Timings};

pub const DEFAULT_SIZES: [usize; 5] = [10, 20, 50, 100, 200];

#[derive(Debug, Clone)]
pub struct ComparisonParams {
    pub functions: Vec<Generator>,
    pub sizes: Vec<usize>,
    pub noise: f64,
    pub seeds: Vec<u64>,
    pub test_count: usize,
    pub scorers: Vec<ScorerId>,
    pub base_seed: u64,
}

impl ComparisonParams {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let mut default_functions = Generator::LINKS.to_vec();
        default_functions.push(Generator::Independent);
        Ok(ComparisonParams {
            functions: s.functions(&default_functions)?,
            sizes: s.sizes(&DEFAULT_SIZES)?,
            noise: s.noise_level(0.4)?,
            seeds: s.seeds()?,
            test_count: s.test_count(500)?,
            scorers: s.scorers(&ScorerId::CONTINUOUS)?,
            base_seed: s.seed(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub function: String,
    pub size: usize,
    pub seed: u64,
    pub data_seed: u64,
    pub noise: f64,
    pub test_count: usize,
    pub scorer: String,
    /// Mean test log density of X under the Y -> X family.
    pub dependent_log_loss: Option<f64>,
    /// Mean test log density of X on its own.
    pub independent_log_loss: Option<f64>,
    /// Dependent minus independent, per test row.
    pub ratio: Option<f64>,
    pub fingerprint: String,
    pub error: String,
}

pub const HEADER: [&str; 12] = [
    "function", "size", "seed", "data_seed", "noise", "test_count", "scorer", "dependent_log_loss",
    "independent_log_loss", "ratio", "fingerprint", "error",
];

pub fn cell_seed(base: u64, function: Generator, size: usize, noise: f64, seed: u64) -> u64 {
    derive_seed(&[
        "model-comparison",
        &base.to_string(),
        function.as_str(),
        &size.to_string(),
        &noise.to_string(),
        &seed.to_string(),
    ])
}

pub fn model_comparison(p: &ComparisonParams, timings: &mut Timings) -> Vec<ComparisonRow> {
    let mut rows = Vec::new();
    for &function in &p.functions {
        for &size in &p.sizes {
            for &seed in &p.seeds {
                let data_seed = cell_seed(p.base_seed, function, size, p.noise, seed);
                let row = |scorer: ScorerId| ComparisonRow {
                    function: function.as_str().into(),
                    size,
                    seed,
                    data_seed,
                    noise: p.noise,
                    test_count: p.test_count,
                    scorer: scorer.as_str().into(),
                    dependent_log_loss: None,
                    independent_log_loss: None,
                    ratio: None,
                    fingerprint: String::new(),
                    error: String::new(),
                };
                let cell = timings.time("generate", || two_variable_cell(function, p.noise, size, p.test_count, data_seed));
                let (train, test) = match cell {
                    Ok(c) => c,
                    Err(e) => {
                        rows.extend(p.scorers.iter().map(|&id| ComparisonRow { error: e.to_string(), ..row(id) }));
                        continue;
                    }
                };
                let fp = fingerprint(&train);
                for &id in &p.scorers {
                    let sc = scorer(id);
                    let base = ComparisonRow { fingerprint: fp.clone(), ..row(id) };
                    let dep = FamilyKey::new(1, [0]).expect("distinct variables");
                    let ind = FamilyKey::empty(1);
                    let result = timings.time("score", || {
                        let d = score_and_loss(&sc, &dep, &train, &test, None).map_err(|e| format!("{dep}: {e}"))?.1;
                        let i = score_and_loss(&sc, &ind, &train, &test, None).map_err(|e| format!("{ind}: {e}"))?.1;
                        Ok::<_, String>((d, i))
                    });
                    rows.push(match result {
                        Ok((d, i)) => ComparisonRow {
                            dependent_log_loss: Some(d),
                            independent_log_loss: Some(i),
                            ratio: Some(d - i),
                            ..base
                        },
                        Err(e) => ComparisonRow { error: e, ..base },
                    });
                }
            }
        }
    }
    rows
}

pub fn run(settings: &Settings) -> Result<Output, CliError> {
    let params = ComparisonParams::from_settings(settings)?;
    let mut timings = Timings::default();
    let rows = model_comparison(&params, &mut timings);
    Ok(Output { body: csv_bytes_with_header(&rows, &HEADER)?, timings })
}
