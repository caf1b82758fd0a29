//! Structure search over DAGs with decomposable family scores, and
//! equivalence-class comparison of the results.

mod climb;
mod dag;
mod moves;
mod pdag;

pub use climb::{arc_allowed, best_move, hill_climb, total_score, SearchConfig, SearchTrace, TraceEntry};
pub use dag::{is_acyclic, random_dag, Dag};
pub use moves::{legal_moves, Move, MoveKind};
pub use pdag::{structure_distance, to_pdag, Pdag, StructureDistance};

use thiserror::Error;

use crate::scoring::ScoreError;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph has {found} variables, expected {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("cannot score family {family}: {source}")]
    Score {
        family: String,
        #[source]
        source: ScoreError,
    },
}
