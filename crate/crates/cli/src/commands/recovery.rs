use gpnet::data::{standardize, synth_generate, Dataset, Link, SynthEdge, SynthSpec};
use gpnet::scoring::{ScoreCache, ScorerId};
use gpnet::search::{hill_climb, structure_distance, to_pdag, Dag, SearchConfig};
use serde::{Deserialize, Serialize};

use super::{format_edges, scorer};
use crate::config::{Architecture, Settings};
use crate::error::CliError;
use crate::output::{csv_bytes_with_header, derive_seed, fingerprint, Output, Timings};

#[derive(Debug, Clone)]
pub struct RecoveryParams {
    pub architectures: Vec<Architecture>,
    pub link: Link,
    pub samples: usize,
    pub noise: f64,
    pub seeds: Vec<u64>,
    pub scorers: Vec<ScorerId>,
    pub max_parents: usize,
    pub base_seed: u64,
}

impl RecoveryParams {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        Ok(RecoveryParams {
            architectures: s.architectures(&Architecture::ALL)?,
            link: s.link()?,
            samples: s.samples(100)?,
            noise: s.noise_level(0.4)?,
            seeds: s.seeds()?,
            scorers: s.scorers(&ScorerId::CONTINUOUS)?,
            max_parents: s.max_parents()?,
            base_seed: s.seed(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryRow {
    pub architecture: String,
    pub link: String,
    pub samples: usize,
    pub noise: f64,
    pub seed: u64,
    pub data_seed: u64,
    pub scorer: String,
    pub missing: Option<usize>,
    pub extra: Option<usize>,
    pub misoriented: Option<usize>,
    /// Learned and true graphs have the same equivalence class.
    pub exact: Option<bool>,
    /// True arcs whose link cannot be inverted.
    pub functional_arcs: usize,
    /// Of those, arcs learned with the functional direction.
    pub oriented_arcs: Option<usize>,
    pub learned: String,
    pub total_score: Option<f64>,
    pub fingerprint: String,
    pub error: String,
}

pub const HEADER: [&str; 17] = [
    "architecture", "link", "samples", "noise", "seed", "data_seed", "scorer", "missing", "extra", "misoriented",
    "exact", "functional_arcs", "oriented_arcs", "learned", "total_score", "fingerprint", "error",
];

pub fn cell_seed(base: u64, arch: Architecture, link: Link, samples: usize, noise: f64, seed: u64) -> u64 {
    derive_seed(&[
        "structure-recovery",
        &base.to_string(),
        arch.as_str(),
        link.as_str(),
        &samples.to_string(),
        &noise.to_string(),
        &seed.to_string(),
    ])
}

pub fn network_data(arch: Architecture, link: Link, samples: usize, noise: f64, seed: u64) -> Result<Dataset, CliError> {
    let edges = arch.edges().into_iter().map(|(parent, child)| SynthEdge { parent, child, link }).collect();
    let raw = synth_generate(&SynthSpec::new(3, edges, noise, samples, seed))?;
    Ok(standardize(&raw, &raw.all_rows())?.0)
}

pub fn structure_recovery(p: &RecoveryParams, timings: &mut Timings) -> Vec<RecoveryRow> {
    let config = SearchConfig { max_parents: p.max_parents, ..SearchConfig::default() };
    let mut rows = Vec::new();
    for &arch in &p.architectures {
        let truth = Dag::from_edges(3, arch.edges()).expect("fixed architectures are valid");
        let true_pdag = to_pdag(&truth);
        let functional_arcs = if p.link.is_invertible() { 0 } else { truth.edge_count() };
        for &seed in &p.seeds {
            let data_seed = cell_seed(p.base_seed, arch, p.link, p.samples, p.noise, seed);
            let row = |id: ScorerId| RecoveryRow {
                architecture: arch.as_str().into(),
                link: p.link.as_str().into(),
                samples: p.samples,
                noise: p.noise,
                seed,
                data_seed,
                scorer: id.as_str().into(),
                missing: None,
                extra: None,
                misoriented: None,
                exact: None,
                functional_arcs,
                oriented_arcs: None,
                learned: String::new(),
                total_score: None,
                fingerprint: String::new(),
                error: String::new(),
            };
            let data = match timings.time("generate", || network_data(arch, p.link, p.samples, p.noise, data_seed)) {
                Ok(d) => d,
                Err(e) => {
                    rows.extend(p.scorers.iter().map(|&id| RecoveryRow { error: e.to_string(), ..row(id) }));
                    continue;
                }
            };
            let fp = fingerprint(&data);
            for &id in &p.scorers {
                let base = RecoveryRow { fingerprint: fp.clone(), ..row(id) };
                let cache = ScoreCache::new();
                let learned = timings.time("search", || hill_climb(&data, &scorer(id), &config, Some(&cache)));
                rows.push(match learned {
                    Ok((dag, trace)) => {
                        let d = structure_distance(&true_pdag, &to_pdag(&dag)).expect("same variable count");
                        let oriented = if functional_arcs == 0 {
                            0
                        } else {
                            truth.edges().into_iter().filter(|&(a, b)| dag.has_edge(a, b)).count()
                        };
                        RecoveryRow {
                            missing: Some(d.missing),
                            extra: Some(d.extra),
                            misoriented: Some(d.misoriented),
                            exact: Some(d.is_zero()),
                            oriented_arcs: Some(oriented),
                            learned: format_edges(&data, &dag.edges()),
                            total_score: Some(trace.final_total()),
                            ..base
                        }
                    }
                    Err(e) => RecoveryRow { error: e.to_string(), ..base },
                });
            }
        }
    }
    rows
}

pub fn run(settings: &Settings) -> Result<Output, CliError> {
    let params = RecoveryParams::from_settings(settings)?;
    let mut timings = Timings::default();
    let rows = structure_recovery(&params, &mut timings);
    Ok(Output { body: csv_bytes_with_header(&rows, &HEADER)?, timings })
}
