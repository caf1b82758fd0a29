use std::fmt;

use serde::{Deserialize, Serialize};

use super::Dag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Add,
    Delete,
    Reverse,
}

/// A one-arc change. For `Reverse` the arc `parent -> child` becomes
/// `child -> parent`. Field order gives the (kind, child, parent) ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub child: usize,
    pub parent: usize,
}

impl Move {
    pub fn add(parent: usize, child: usize) -> Self {
        Move { kind: MoveKind::Add, child, parent }
    }

    pub fn delete(parent: usize, child: usize) -> Self {
        Move { kind: MoveKind::Delete, child, parent }
    }

    pub fn reverse(parent: usize, child: usize) -> Self {
        Move { kind: MoveKind::Reverse, child, parent }
    }

    /// Variables whose parent sets change.
    pub fn touched(&self) -> Vec<usize> {
        match self.kind {
            MoveKind::Add | MoveKind::Delete => vec![self.child],
            MoveKind::Reverse => vec![self.child, self.parent],
        }
    }

    pub fn apply(&self, dag: &Dag) -> Dag {
        let mut out = dag.clone();
        match self.kind {
            MoveKind::Add => out.insert(self.parent, self.child),
            MoveKind::Delete => out.remove(self.parent, self.child),
            MoveKind::Reverse => {
                out.remove(self.parent, self.child);
                out.insert(self.child, self.parent);
            }
        }
        out
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verb = match self.kind {
            MoveKind::Add => "add",
            MoveKind::Delete => "delete",
            MoveKind::Reverse => "reverse",
        };
        write!(f, "{verb} {}->{}", self.parent, self.child)
    }
}

/// Every single-arc change that keeps the graph acyclic, within
/// `max_parents`, and consistent with `allowed(parent, child)`. Sorted by
/// (kind, child, parent).
pub fn legal_moves(dag: &Dag, max_parents: usize, allowed: impl Fn(usize, usize) -> bool) -> Vec<Move> {
    let n = dag.n();
    let mut moves = Vec::new();
    for child in 0..n {
        for parent in 0..n {
            if parent == child || dag.adjacent(parent, child) {
                continue;
            }
            if dag.parents(child).len() < max_parents && allowed(parent, child) && !dag.reaches(child, parent, None) {
                moves.push(Move::add(parent, child));
            }
        }
    }
    for child in 0..n {
        for &parent in dag.parents(child) {
            moves.push(Move::delete(parent, child));
            if dag.parents(parent).len() < max_parents
                && allowed(child, parent)
                && !dag.reaches(parent, child, Some((parent, child)))
            {
                moves.push(Move::reverse(parent, child));
            }
        }
    }
    moves.sort();
    moves
}
