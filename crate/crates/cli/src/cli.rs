//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_schema_entry, parse_seeds, OneOrMany, Settings};

/// Seeds given as `a..b` or a comma list.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedList(pub Vec<u64>);

fn seed_list(s: &str) -> Result<SeedList, String> {
    parse_seeds(s).map(SeedList)
}

#[derive(Debug, Parser)]
#[command(name = "gpnet", version, about = "Bayesian network structure learning with Gaussian process family scores")]
pub struct Cli {
    /// TOML file with any of the documented keys; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// gp, linear_gaussian or kernel; comma separated where a command
    /// compares scorers.
    #[arg(long, global = true, value_delimiter = ',')]
    pub scorer: Vec<String>,
    #[arg(long, global = true)]
    pub max_parents: Option<usize>,
    /// Output file (stdout when omitted). Timings go to `<out>.timing.json`.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn a network structure from a delimited file.
    Learn(LearnArgs),
    /// Score one family under one or more scorers.
    Score(ScoreArgs),
    /// Family scores and test log losses of the three two-variable models
    /// across noise levels.
    NoiseSweep(SweepArgs),
    /// Dependent-minus-independent test log loss against training size.
    ModelComparison(ComparisonArgs),
    /// Recover three-variable networks and compare equivalence classes.
    StructureRecovery(RecoveryArgs),
    /// Learn on growing prefixes of a permuted file and report test
    /// log-likelihood.
    Benchmark(BenchmarkArgs),
    /// Predictive mean and sd of a one-parent GP family over a grid.
    PredictProfile(ProfileArgs),
}

#[derive(Debug, Args, Default)]
pub struct DataArgs {
    #[arg(long, value_name = "FILE")]
    pub input: Vec<PathBuf>,
    /// Column type override, NAME=continuous or NAME=discrete:<arity>.
    #[arg(long = "schema", value_name = "NAME=HINT", value_parser = parse_schema_entry)]
    pub schema: Vec<(String, String)>,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub child: Option<String>,
    /// Comma-separated parent names; omit for the empty parent set.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub parents: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// linear, quadratic, cubic, sinusoidal.
    #[arg(long, value_delimiter = ',')]
    pub functions: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub noise: Option<Vec<f64>>,
    /// `a..b` or a comma list.
    #[arg(long, value_parser = seed_list)]
    pub seeds: Option<SeedList>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub test_count: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ComparisonArgs {
    /// As for noise-sweep, plus `independent`.
    #[arg(long, value_delimiter = ',')]
    pub functions: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, value_parser = seed_list)]
    pub seeds: Option<SeedList>,
    #[arg(long)]
    pub test_count: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RecoveryArgs {
    /// chain, fork, collider, triangle, pair, empty.
    #[arg(long, value_delimiter = ',')]
    pub architectures: Option<Vec<String>>,
    #[arg(long)]
    pub link: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, value_parser = seed_list)]
    pub seeds: Option<SeedList>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub test_count: Option<usize>,
    #[arg(long, value_parser = seed_list)]
    pub seeds: Option<SeedList>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub child: Option<String>,
    #[arg(long)]
    pub parent: Option<String>,
    #[arg(long)]
    pub grid_points: Option<usize>,
}

impl DataArgs {
    fn settings(&self) -> Settings {
        Settings {
            input: (!self.input.is_empty()).then(|| OneOrMany::Many(self.input.clone())),
            schema: self.schema.iter().cloned().collect(),
            ..Settings::default()
        }
    }
}

impl Cli {
    /// Flag values as a settings layer.
    pub fn settings(&self) -> Settings {
        let mut s = match &self.command {
            Command::Learn(a) => Settings { restarts: a.restarts, ..a.data.settings() },
            Command::Score(a) => Settings { child: a.child.clone(), parents: a.parents.clone(), ..a.data.settings() },
            Command::NoiseSweep(a) => Settings {
                functions: a.functions.clone(),
                noise: a.noise.clone().map(OneOrMany::Many),
                seeds: a.seeds.clone().map(|s| s.0),
                samples: a.samples,
                test_count: a.test_count,
                ..Settings::default()
            },
            Command::ModelComparison(a) => Settings {
                functions: a.functions.clone(),
                sizes: a.sizes.clone(),
                noise: a.noise.map(OneOrMany::One),
                seeds: a.seeds.clone().map(|s| s.0),
                test_count: a.test_count,
                ..Settings::default()
            },
            Command::StructureRecovery(a) => Settings {
                architectures: a.architectures.clone(),
                link: a.link.clone(),
                samples: a.samples,
                noise: a.noise.map(OneOrMany::One),
                seeds: a.seeds.clone().map(|s| s.0),
                ..Settings::default()
            },
            Command::Benchmark(a) => Settings {
                sizes: a.sizes.clone(),
                test_count: a.test_count,
                seeds: a.seeds.clone().map(|s| s.0),
                ..a.data.settings()
            },
            Command::PredictProfile(a) => Settings {
                child: a.child.clone(),
                parent: a.parent.clone(),
                grid_points: a.grid_points,
                ..a.data.settings()
            },
        };
        s.seed = self.seed;
        s.scorer = (!self.scorer.is_empty()).then(|| OneOrMany::Many(self.scorer.clone()));
        s.max_parents = self.max_parents;
        s.out = self.out.clone();
        s
    }
}
