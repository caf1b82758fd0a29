//! The seven commands. Each experiment is a library function from resolved
//! parameters to rows so that it can be driven without the binary.

pub mod benchmark;
pub mod comparison;
pub mod learn;
pub mod profile;
pub mod recovery;
pub mod score;
pub mod sweep;

use gpnet::data::{load_delimited, standardize, synth_generate, DataError, Dataset, Standardization, SynthEdge, SynthSpec};
use gpnet::scoring::{family_test_log_loss, FamilyKey, FamilyScore, FamilyScorer, ScoreCache, ScoreConfig, ScoreError, Scorer, ScorerId};

use crate::cli::Command;
use crate::config::{Generator, Settings};
use crate::error::{usage, CliError};
use crate::output::{derive_seed, Output};

pub fn run(command: &Command, settings: &Settings) -> Result<Output, CliError> {
    match command {
        Command::Learn(_) => learn::run(settings),
        Command::Score(_) => score::run(settings),
        Command::NoiseSweep(_) => sweep::run(settings),
        Command::ModelComparison(_) => comparison::run(settings),
        Command::StructureRecovery(_) => recovery::run(settings),
        Command::Benchmark(_) => benchmark::run(settings),
        Command::PredictProfile(_) => profile::run(settings),
    }
}

/// Loads the configured input and standardizes it on all rows.
pub(crate) fn load_standardized(settings: &Settings) -> Result<(Dataset, Standardization), CliError> {
    let raw = load_delimited(&settings.input()?, &settings.hints()?)?;
    Ok(standardize(&raw, &raw.all_rows())?)
}

pub(crate) fn column(data: &Dataset, name: &str) -> Result<usize, CliError> {
    data.index_of(name).ok_or_else(|| usage(format!("unknown variable '{name}'")))
}

pub(crate) fn scorer(id: ScorerId) -> FamilyScorer {
    FamilyScorer::new(id, ScoreConfig::default()).expect("continuous scorer ids only")
}

/// Train and test sets of a two-variable generator, columns `[Y, X]` with
/// `X` depending on `Y`, both standardized with the train statistics.
pub fn two_variable_cell(
    generator: Generator,
    noise: f64,
    train_rows: usize,
    test_rows: usize,
    seed: u64,
) -> Result<(Dataset, Dataset), DataError> {
    let edges = match generator {
        Generator::Link(link) => vec![SynthEdge { parent: 0, child: 1, link }],
        Generator::Independent => vec![],
    };
    // separate streams, so the training sample does not depend on the test size
    let draw = |rows: usize, seed: u64| {
        let mut spec = SynthSpec::new(2, edges.clone(), noise, rows, seed);
        spec.names = vec!["Y".into(), "X".into()];
        synth_generate(&spec)
    };
    let raw_train = draw(train_rows, seed)?;
    let raw_test = draw(test_rows, derive_seed(&["test", &seed.to_string()]))?;
    let (train, st) = standardize(&raw_train, &raw_train.all_rows())?;
    Ok((train, st.apply(&raw_test)?))
}

/// A family score together with its mean test log density.
pub(crate) fn score_and_loss(
    scorer: &dyn Scorer,
    key: &FamilyKey,
    train: &Dataset,
    test: &Dataset,
    cache: Option<&ScoreCache>,
) -> Result<(FamilyScore, f64), ScoreError> {
    let s = match cache {
        Some(c) => c.get_or_compute(key, train, scorer)?,
        None => scorer.score_family(key, train)?,
    };
    let loss = family_test_log_loss(&s, train, test)?;
    Ok((s, loss))
}

pub(crate) fn format_edges(data: &Dataset, edges: &[(usize, usize)]) -> String {
    edges.iter().map(|&(p, c)| format!("{}->{}", data.name(p), data.name(c))).collect::<Vec<_>>().join(";")
}
