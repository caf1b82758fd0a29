use gpnet::scoring::{FamilyKey, ScoreCache, ScorerId};
use serde::{Deserialize, Serialize};

use super::{score_and_loss, scorer, two_variable_cell};
use crate::config::{Generator, Settings};
use crate::error::{usage, CliError};
use crate::output::{csv_bytes_with_header, derive_seed, fingerprint, Output, Timings};

pub const DEFAULT_NOISE: [f64; 8] = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6];
pub const MODELS: [&str; 3] = ["indep", "true-direction", "reverse"];

#[derive(Debug, Clone)]
pub struct SweepParams {
    pub functions: Vec<Generator>,
    pub noise: Vec<f64>,
    pub seeds: Vec<u64>,
    pub samples: usize,
    pub test_count: usize,
    pub scorers: Vec<ScorerId>,
    pub base_seed: u64,
}

impl SweepParams {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let functions = s.functions(&Generator::LINKS)?;
        if functions.contains(&Generator::Independent) {
            return Err(usage("noise-sweep needs a functional dependence; 'independent' has no direction"));
        }
        Ok(SweepParams {
            functions,
            noise: s.noise_grid(&DEFAULT_NOISE)?,
            seeds: s.seeds()?,
            samples: s.samples(100)?,
            test_count: s.test_count(500)?,
            scorers: s.scorers(&[ScorerId::Gp])?,
            base_seed: s.seed(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub function: String,
    pub noise: f64,
    pub seed: u64,
    pub data_seed: u64,
    pub samples: usize,
    pub test_count: usize,
    pub scorer: String,
    /// `indep`, `true-direction` (Y -> X) or `reverse` (X -> Y).
    pub model: String,
    /// Network log score, the sum of its two family scores.
    pub score: Option<f64>,
    /// Mean joint log density of a test row.
    pub test_log_loss: Option<f64>,
    pub fingerprint: String,
    pub error: String,
}

pub const HEADER: [&str; 12] = [
    "function", "noise", "seed", "data_seed", "samples", "test_count", "scorer", "model", "score", "test_log_loss",
    "fingerprint", "error",
];

pub fn cell_seed(base: u64, function: Generator, noise: f64, seed: u64) -> u64 {
    derive_seed(&["noise-sweep", &base.to_string(), function.as_str(), &noise.to_string(), &seed.to_string()])
}

pub fn noise_sweep(p: &SweepParams, timings: &mut Timings) -> Vec<SweepRow> {
    const Y: usize = 0;
    const X: usize = 1;
    let mut rows = Vec::new();
    for &function in &p.functions {
        for &noise in &p.noise {
            for &seed in &p.seeds {
                let data_seed = cell_seed(p.base_seed, function, noise, seed);
                let row = |scorer: &str, model: &str| SweepRow {
                    function: function.as_str().into(),
                    noise,
                    seed,
                    data_seed,
                    samples: p.samples,
                    test_count: p.test_count,
                    scorer: scorer.into(),
                    model: model.into(),
                    score: None,
                    test_log_loss: None,
                    fingerprint: String::new(),
                    error: String::new(),
                };
                let cell = timings.time("generate", || two_variable_cell(function, noise, p.samples, p.test_count, data_seed));
                let (train, test) = match cell {
                    Ok(c) => c,
                    Err(e) => {
                        for &id in &p.scorers {
                            rows.extend(MODELS.iter().map(|m| SweepRow { error: e.to_string(), ..row(id.as_str(), m) }));
                        }
                        continue;
                    }
                };
                let fp = fingerprint(&train);
                for &id in &p.scorers {
                    let sc = scorer(id);
                    let cache = ScoreCache::new();
                    let fam = |child: usize, parents: &[usize]| {
                        let key = FamilyKey::new(child, parents.iter().copied()).expect("distinct variables");
                        score_and_loss(&sc, &key, &train, &test, Some(&cache))
                            .map(|(s, l)| (s.log_score, l))
                            .map_err(|e| format!("{key}: {e}"))
                    };
                    let (x0, y0, xy, yx) = timings.time("score", || (fam(X, &[]), fam(Y, &[]), fam(X, &[Y]), fam(Y, &[X])));
                    for (model, a, b) in [("indep", &x0, &y0), ("true-direction", &xy, &y0), ("reverse", &yx, &x0)] {
                        let base = SweepRow { fingerprint: fp.clone(), ..row(id.as_str(), model) };
                        rows.push(match (a, b) {
                            (Ok(a), Ok(b)) => SweepRow { score: Some(a.0 + b.0), test_log_loss: Some(a.1 + b.1), ..base },
                            (Err(e), _) | (_, Err(e)) => SweepRow { error: e.clone(), ..base },
                        });
                    }
                }
            }
        }
    }
    rows
}

pub fn run(settings: &Settings) -> Result<Output, CliError> {
    let params = SweepParams::from_settings(settings)?;
    let mut timings = Timings::default();
    let rows = noise_sweep(&params, &mut timings);
    Ok(Output { body: csv_bytes_with_header(&rows, &HEADER)?, timings })
}
