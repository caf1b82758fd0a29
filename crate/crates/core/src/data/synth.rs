use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{DataError, Dataset};

/// Functional form of a generated dependency, applied to a standardized
/// parent value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Link {
    Linear,
    Quadratic,
    Cubic,
    Sinusoidal,
}

impl Link {
    pub const ALL: [Link; 4] = [Link::Linear, Link::Quadratic, Link::Cubic, Link::Sinusoidal];

    pub fn apply(self, u: f64) -> f64 {
        match self {
            Link::Linear => u,
            Link::Quadratic => u * u,
            Link::Cubic => u * u * u - u,
            Link::Sinusoidal => (2.5 * u).sin(),
        }
    }

    /// Whether the parent can in principle be recovered from the child.
    pub fn is_invertible(self) -> bool {
        matches!(self, Link::Linear)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Link::Linear => "linear",
            Link::Quadratic => "quadratic",
            Link::Cubic => "cubic",
            Link::Sinusoidal => "sinusoidal",
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Link {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Link::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| DataError::InvalidSpec(format!("unknown link '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthEdge {
    pub parent: usize,
    pub child: usize,
    pub link: Link,
}

/// Generator for a continuous network with functional dependencies and
/// additive Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    pub edges: Vec<SynthEdge>,
    /// Noise standard deviation in units of the clean child signal's SD.
    pub noise_level: f64,
    pub samples: usize,
    pub seed: u64,
    /// Column names; `X0..X{n-1}` when empty.
    #[serde(default)]
    pub names: Vec<String>,
}

impl SynthSpec {
    pub fn new(n: usize, edges: Vec<SynthEdge>, noise_level: f64, samples: usize, seed: u64) -> Self {
        SynthSpec { n, edges, noise_level, samples, seed, names: Vec::new() }
    }

    fn column_names(&self) -> Vec<String> {
        if self.names.is_empty() {
            (0..self.n).map(|i| format!("X{i}")).collect()
        } else {
            self.names.clone()
        }
    }

    fn validate(&self) -> Result<(), DataError> {
        if !(self.noise_level.is_finite() && self.noise_level >= 0.0) {
            return Err(DataError::InvalidSpec(format!("noise level {}", self.noise_level)));
        }
        if self.samples == 0 || self.n == 0 {
            return Err(DataError::InvalidSpec("need at least one variable and one sample".into()));
        }
        if !self.names.is_empty() && self.names.len() != self.n {
            return Err(DataError::InvalidSpec(format!("{} names for {} variables", self.names.len(), self.n)));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.parent >= self.n || e.child >= self.n || e.parent == e.child {
                return Err(DataError::InvalidSpec(format!("edge {} -> {}", e.parent, e.child)));
            }
            if self.edges[..i].iter().any(|o| o.parent == e.parent && o.child == e.child) {
                return Err(DataError::InvalidSpec(format!("duplicate edge {} -> {}", e.parent, e.child)));
            }
        }
        Ok(())
    }

    /// Topological order, smallest ready index first.
    fn order(&self) -> Result<Vec<usize>, DataError> {
        let mut indegree = vec![0usize; self.n];
        for e in &self.edges {
            indegree[e.child] += 1;
        }
        let mut done = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        while order.len() < self.n {
            let next = (0..self.n).find(|&v| !done[v] && indegree[v] == 0).ok_or(DataError::CyclicSpec)?;
            done[next] = true;
            order.push(next);
            for e in self.edges.iter().filter(|e| e.parent == next) {
                indegree[e.child] -= 1;
            }
        }
        Ok(order)
    }
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Samples a dataset from `spec`. Roots are i.i.d. standard normal. A child
/// is the sum of its links applied to standardized parents plus noise with
/// SD `noise_level * sd(clean signal)`.
pub fn synth_generate(spec: &SynthSpec) -> Result<Dataset, DataError> {
    spec.validate()?;
    let order = spec.order()?;
    let m = spec.samples;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); spec.n];
    let mut is_root = vec![true; spec.n];
    for e in &spec.edges {
        is_root[e.child] = false;
    }
    for &v in &order {
        let incoming: Vec<&SynthEdge> = spec.edges.iter().filter(|e| e.child == v).collect();
        if incoming.is_empty() {
            columns[v] = (0..m).map(|_| rng.sample(StandardNormal)).collect();
            continue;
        }
        let mut clean = vec![0.0; m];
        for e in incoming {
            let parent = &columns[e.parent];
            let (mean, sd) = if is_root[e.parent] { (0.0, 1.0) } else { mean_sd(parent) };
            let sd = if sd > 0.0 { sd } else { 1.0 };
            for (c, p) in clean.iter_mut().zip(parent) {
                *c += e.link.apply((p - mean) / sd);
            }
        }
        let noise_sd = spec.noise_level * mean_sd(&clean).1;
        columns[v] = clean.iter().map(|c| c + noise_sd * rng.sample::<f64, _>(StandardNormal)).collect();
    }
    let values = DMatrix::from_fn(m, spec.n, |i, j| columns[j][i]);
    let names = spec.column_names();
    Dataset::continuous(&names.iter().map(String::as_str).collect::<Vec<_>>(), values)
}
