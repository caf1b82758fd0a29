use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SearchError;

/// A directed graph over `n` variables stored as sorted parent lists.
///
/// Construction rejects self-loops and out-of-range indices but not cycles,
/// so that [`is_acyclic`] can be asked about arbitrary edge sets; every graph
/// produced by the search is acyclic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dag {
    n: usize,
    parents: Vec<Vec<usize>>,
}

impl Dag {
    pub fn empty(n: usize) -> Self {
        Dag { n, parents: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, SearchError> {
        let mut dag = Dag::empty(n);
        for (p, c) in edges {
            if p >= n || c >= n {
                return Err(SearchError::InvalidGraph(format!("edge {p}->{c} outside 0..{n}")));
            }
            if p == c {
                return Err(SearchError::InvalidGraph(format!("self-loop on {p}")));
            }
            dag.insert(p, c);
        }
        Ok(dag)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parents(&self, child: usize) -> &[usize] {
        &self.parents[child]
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        self.parents[child].binary_search(&parent).is_ok()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// Edges as `(parent, child)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<(usize, usize)> =
            (0..self.n).flat_map(|c| self.parents[c].iter().map(move |&p| (p, c))).collect();
        set.into_iter().collect()
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub fn children(&self, parent: usize) -> Vec<usize> {
        (0..self.n).filter(|&c| self.has_edge(parent, c)).collect()
    }

    pub(crate) fn insert(&mut self, parent: usize, child: usize) {
        if let Err(pos) = self.parents[child].binary_search(&parent) {
            self.parents[child].insert(pos, parent);
        }
    }

    pub(crate) fn remove(&mut self, parent: usize, child: usize) {
        if let Ok(pos) = self.parents[child].binary_search(&parent) {
            self.parents[child].remove(pos);
        }
    }

    /// Whether `to` can be reached from `from` along directed edges,
    /// optionally ignoring one edge.
    pub(crate) fn reaches(&self, from: usize, to: usize, skip: Option<(usize, usize)>) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            for c in 0..self.n {
                if !seen[c] && self.has_edge(v, c) && skip != Some((v, c)) {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        false
    }

    /// Kahn ordering, smallest ready index first; `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..self.n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for c in 0..self.n {
                if self.has_edge(v, c) {
                    indegree[c] -= 1;
                    if indegree[c] == 0 {
                        ready.insert(c);
                    }
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn max_in_degree(&self) -> usize {
        self.parents.iter().map(Vec::len).max().unwrap_or(0)
    }
}

impl fmt::Display for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges().iter().map(|(p, c)| format!("{p}->{c}")).collect();
        write!(f, "[{}]", edges.join(", "))
    }
}

pub fn is_acyclic(dag: &Dag) -> bool {
    dag.topological_order().is_some()
}

/// Random DAG: a random variable order, then each forward pair becomes an
/// edge with probability `edge_prob` while the child has fewer than
/// `max_parents` parents and `allowed(parent, child)` holds.
pub fn random_dag<R: Rng + ?Sized>(
    n: usize,
    edge_prob: f64,
    max_parents: usize,
    allowed: impl Fn(usize, usize) -> bool,
    rng: &mut R,
) -> Dag {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut dag = Dag::empty(n);
    for j in 0..n {
        for i in 0..j {
            let (p, c) = (order[i], order[j]);
            if dag.parents[c].len() < max_parents && allowed(p, c) && rng.random_bool(edge_prob) {
                dag.insert(p, c);
            }
        }
    }
    dag
}
