//! Run settings: an optional TOML file overlaid by command-line flags, then
//! resolved to validated parameters with documented defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gpnet::data::{Link, SchemaHint};
use gpnet::scoring::ScorerId;
use serde::Deserialize;

use crate::error::{usage, CliError};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    pub fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Every documented key. Unknown keys in a config file are an error.
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub input: Option<OneOrMany<PathBuf>>,
    #[serde(default)]
    pub schema: BTreeMap<String, String>,
    pub scorer: Option<OneOrMany<String>>,
    pub max_parents: Option<usize>,
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub noise: Option<OneOrMany<f64>>,
    pub samples: Option<usize>,
    pub sizes: Option<Vec<usize>>,
    pub test_count: Option<usize>,
    pub functions: Option<Vec<String>>,
    pub architectures: Option<Vec<String>>,
    pub link: Option<String>,
    pub child: Option<String>,
    pub parents: Option<Vec<String>>,
    pub parent: Option<String>,
    pub grid_points: Option<usize>,
    pub restarts: Option<usize>,
    pub out: Option<PathBuf>,
}

pub const MAX_PARENTS_LIMIT: usize = 8;
pub const MAX_NOISE: f64 = 10.0;
pub const SAMPLES_RANGE: (usize, usize) = (5, 20_000);
pub const MAX_TEST_COUNT: usize = 100_000;
pub const GRID_RANGE: (usize, usize) = (2, 100_000);
pub const MAX_RESTARTS: usize = 100;
pub const MAX_SEEDS: usize = 1000;

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Overwrites every field that `other` sets.
    pub fn overlay(&mut self, other: Settings) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            input, scorer, max_parents, seed, seeds, noise, samples, sizes, test_count, functions, architectures, link,
            child, parents, parent, grid_points, restarts, out
        );
        self.schema.extend(other.schema);
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn inputs(&self) -> Result<Vec<PathBuf>, CliError> {
        match self.input.clone().map(OneOrMany::into_vec) {
            Some(v) if !v.is_empty() => Ok(v),
            _ => Err(usage("no input file given (--input)")),
        }
    }

    pub fn input(&self) -> Result<PathBuf, CliError> {
        let v = self.inputs()?;
        if v.len() != 1 {
            return Err(usage("this command takes exactly one input file"));
        }
        Ok(v.into_iter().next().expect("length checked"))
    }

    pub fn hints(&self) -> Result<BTreeMap<String, SchemaHint>, CliError> {
        self.schema
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.parse::<SchemaHint>().map_err(|e| usage(e.to_string()))?)))
            .collect()
    }

    pub fn scorers(&self, default: &[ScorerId]) -> Result<Vec<ScorerId>, CliError> {
        let Some(names) = self.scorer.clone().map(OneOrMany::into_vec) else {
            return Ok(default.to_vec());
        };
        let mut out = Vec::new();
        for name in names {
            let id: ScorerId = name.parse().map_err(|_| usage(format!("unknown scorer '{name}'")))?;
            if id == ScorerId::Discrete {
                return Err(usage("the discrete score is chosen automatically for discrete children"));
            }
            if !out.contains(&id) {
                out.push(id);
            }
        }
        if out.is_empty() {
            return Err(usage("empty scorer list"));
        }
        Ok(out)
    }

    /// Exactly one scorer.
    pub fn scorer(&self, default: ScorerId) -> Result<ScorerId, CliError> {
        let v = self.scorers(&[default])?;
        if v.len() != 1 {
            return Err(usage("this command takes a single scorer"));
        }
        Ok(v[0])
    }

    pub fn max_parents(&self) -> Result<usize, CliError> {
        let v = self.max_parents.unwrap_or(3);
        in_range("max_parents", v, 0, MAX_PARENTS_LIMIT)
    }

    pub fn seeds(&self) -> Result<Vec<u64>, CliError> {
        let v = self.seeds.clone().unwrap_or_else(|| (0..20).collect());
        if v.is_empty() || v.len() > MAX_SEEDS {
            return Err(usage(format!("seeds: need 1 to {MAX_SEEDS} values")));
        }
        Ok(v)
    }

    pub fn noise_grid(&self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let v = self.noise.clone().map_or_else(|| default.to_vec(), OneOrMany::into_vec);
        if v.is_empty() {
            return Err(usage("noise: empty grid"));
        }
        for &x in &v {
            if !(x.is_finite() && (0.0..=MAX_NOISE).contains(&x)) {
                return Err(usage(format!("noise {x} outside [0, {MAX_NOISE}]")));
            }
        }
        Ok(v)
    }

    pub fn noise_level(&self, default: f64) -> Result<f64, CliError> {
        let v = self.noise_grid(&[default])?;
        if v.len() != 1 {
            return Err(usage("this command takes a single noise level"));
        }
        Ok(v[0])
    }

    pub fn samples(&self, default: usize) -> Result<usize, CliError> {
        in_range("samples", self.samples.unwrap_or(default), SAMPLES_RANGE.0, SAMPLES_RANGE.1)
    }

    pub fn sizes(&self, default: &[usize]) -> Result<Vec<usize>, CliError> {
        let v = self.sizes.clone().unwrap_or_else(|| default.to_vec());
        if v.is_empty() {
            return Err(usage("sizes: empty grid"));
        }
        for &s in &v {
            in_range("size", s, SAMPLES_RANGE.0, SAMPLES_RANGE.1)?;
        }
        Ok(v)
    }

    pub fn test_count(&self, default: usize) -> Result<usize, CliError> {
        in_range("test_count", self.test_count.unwrap_or(default), 1, MAX_TEST_COUNT)
    }

    pub fn grid_points(&self) -> Result<usize, CliError> {
        in_range("grid_points", self.grid_points.unwrap_or(200), GRID_RANGE.0, GRID_RANGE.1)
    }

    pub fn restarts(&self) -> Result<usize, CliError> {
        in_range("restarts", self.restarts.unwrap_or(0), 0, MAX_RESTARTS)
    }

    pub fn functions(&self, default: &[Generator]) -> Result<Vec<Generator>, CliError> {
        match &self.functions {
            None => Ok(default.to_vec()),
            Some(v) if v.is_empty() => Err(usage("functions: empty list")),
            Some(v) => v.iter().map(|s| s.parse()).collect(),
        }
    }

    pub fn link(&self) -> Result<Link, CliError> {
        self.link.as_deref().map_or(Ok(Link::Quadratic), |s| s.parse().map_err(|e: gpnet::data::DataError| usage(e.to_string())))
    }

    pub fn architectures(&self, default: &[Architecture]) -> Result<Vec<Architecture>, CliError> {
        match &self.architectures {
            None => Ok(default.to_vec()),
            Some(v) if v.is_empty() => Err(usage("architectures: empty list")),
            Some(v) => v.iter().map(|s| s.parse()).collect(),
        }
    }

    pub fn child(&self) -> Result<String, CliError> {
        self.child.clone().ok_or_else(|| usage("no child variable given (--child)"))
    }
}

fn in_range(name: &str, v: usize, lo: usize, hi: usize) -> Result<usize, CliError> {
    if (lo..=hi).contains(&v) {
        Ok(v)
    } else {
        Err(usage(format!("{name} = {v} outside [{lo}, {hi}]")))
    }
}

/// Two-variable generator: a functional link or the independent null case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Link(Link),
    Independent,
}

impl Generator {
    pub const LINKS: [Generator; 4] = [
        Generator::Link(Link::Linear),
        Generator::Link(Link::Quadratic),
        Generator::Link(Link::Cubic),
        Generator::Link(Link::Sinusoidal),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Generator::Link(l) => l.as_str(),
            Generator::Independent => "independent",
        }
    }
}

impl FromStr for Generator {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if s == "independent" {
            return Ok(Generator::Independent);
        }
        s.parse::<Link>().map(Generator::Link).map_err(|_| usage(format!("unknown function '{s}'")))
    }
}

/// Three-variable network shapes for the recovery experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    /// 0 -> 1 -> 2
    Chain,
    /// 0 <- 1 -> 2
    Fork,
    /// 0 -> 2 <- 1
    Collider,
    /// 0 -> 1 -> 2 and 0 -> 2
    Triangle,
    /// 0 -> 1, 2 isolated
    Pair,
    Empty,
}

impl Architecture {
    pub const ALL: [Architecture; 6] = [
        Architecture::Chain,
        Architecture::Fork,
        Architecture::Collider,
        Architecture::Triangle,
        Architecture::Pair,
        Architecture::Empty,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Architecture::Chain => "chain",
            Architecture::Fork => "fork",
            Architecture::Collider => "collider",
            Architecture::Triangle => "triangle",
            Architecture::Pair => "pair",
            Architecture::Empty => "empty",
        }
    }

    pub fn edges(self) -> Vec<(usize, usize)> {
        match self {
            Architecture::Chain => vec![(0, 1), (1, 2)],
            Architecture::Fork => vec![(1, 0), (1, 2)],
            Architecture::Collider => vec![(0, 2), (1, 2)],
            Architecture::Triangle => vec![(0, 1), (0, 2), (1, 2)],
            Architecture::Pair => vec![(0, 1)],
            Architecture::Empty => vec![],
        }
    }
}

impl FromStr for Architecture {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Architecture::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| usage(format!("unknown architecture '{s}'")))
    }
}

/// `a..b` (half open) or a comma list.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("bad seed range '{s}': {e}"))?;
        let b: u64 = b.trim().parse().map_err(|e| format!("bad seed range '{s}': {e}"))?;
        if b <= a {
            return Err(format!("empty seed range '{s}'"));
        }
        return Ok((a..b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|e| format!("bad seed '{t}': {e}"))).collect()
}

/// `NAME=HINT`.
pub fn parse_schema_entry(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=HINT, got '{s}'"))?;
    v.parse::<SchemaHint>().map_err(|e| e.to_string())?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}
