use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Dag, SearchError};

/// Partially directed graph: compelled arcs plus undirected edges stored
/// with the lower index first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pdag {
    pub n: usize,
    pub directed: BTreeSet<(usize, usize)>,
    pub undirected: BTreeSet<(usize, usize)>,
}

impl Pdag {
    fn has_arc(&self, a: usize, b: usize) -> bool {
        self.directed.contains(&(a, b))
    }

    fn has_line(&self, a: usize, b: usize) -> bool {
        self.undirected.contains(&(a.min(b), a.max(b)))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_arc(a, b) || self.has_arc(b, a) || self.has_line(a, b)
    }

    fn orient(&mut self, a: usize, b: usize) {
        self.undirected.remove(&(a.min(b), a.max(b)));
        self.directed.insert((a, b));
    }

    /// Unordered skeleton edges, lower index first.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        self.directed.iter().map(|&(a, b)| (a.min(b), a.max(b))).chain(self.undirected.iter().copied()).collect()
    }
}

/// Equivalence-class representative of a DAG: v-structure arcs are kept,
/// then orientations forced by Meek's first three rules are propagated and
/// everything else is left undirected.
pub fn to_pdag(dag: &Dag) -> Pdag {
    let n = dag.n();
    let mut out = Pdag { n, directed: BTreeSet::new(), undirected: BTreeSet::new() };
    for (p, c) in dag.edges() {
        out.undirected.insert((p.min(c), p.max(c)));
    }
    for c in 0..n {
        let ps = dag.parents(c);
        for (i, &a) in ps.iter().enumerate() {
            for &b in &ps[i + 1..] {
                if !dag.adjacent(a, b) {
                    out.orient(a, c);
                    out.orient(b, c);
                }
            }
        }
    }
    while meek_step(&mut out) {}
    out
}

/// Applies the first applicable orientation; false when none applies.
fn meek_step(g: &mut Pdag) -> bool {
    let lines: Vec<(usize, usize)> = g.undirected.iter().copied().collect();
    for (x, y) in lines {
        for (a, b) in [(x, y), (y, x)] {
            if forced(g, a, b) {
                g.orient(a, b);
                return true;
            }
        }
    }
    false
}

/// Whether the undirected edge a - b must be oriented a -> b.
fn forced(g: &Pdag, a: usize, b: usize) -> bool {
    let n = g.n;
    // R1: c -> a - b with c, b non-adjacent
    if (0..n).any(|c| c != b && g.has_arc(c, a) && !g.adjacent(c, b)) {
        return true;
    }
    // R2: a -> c -> b
    if (0..n).any(|c| g.has_arc(a, c) && g.has_arc(c, b)) {
        return true;
    }
    // R3: a - c -> b and a - d -> b with c, d non-adjacent
    let mids: Vec<usize> = (0..n).filter(|&c| g.has_line(a, c) && g.has_arc(c, b)).collect();
    mids.iter().enumerate().any(|(i, &c)| mids[i + 1..].iter().any(|&d| !g.adjacent(c, d)))
}

/// Edge-level comparison of a learned structure against the truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StructureDistance {
    /// Skeleton edges of the truth absent from the learned graph.
    pub missing: usize,
    /// Skeleton edges of the learned graph absent from the truth.
    pub extra: usize,
    /// Shared skeleton edges whose orientation status differs.
    pub misoriented: usize,
}

impl StructureDistance {
    pub fn is_zero(&self) -> bool {
        *self == StructureDistance::default()
    }
}

fn status(g: &Pdag, a: usize, b: usize) -> i8 {
    if g.has_arc(a, b) {
        1
    } else if g.has_arc(b, a) {
        -1
    } else {
        0
    }
}

/// Compares `learned` against `truth`.
pub fn structure_distance(truth: &Pdag, learned: &Pdag) -> Result<StructureDistance, SearchError> {
    if truth.n != learned.n {
        return Err(SearchError::SizeMismatch { expected: truth.n, found: learned.n });
    }
    let (ts, ls) = (truth.skeleton(), learned.skeleton());
    let misoriented = ts.intersection(&ls).filter(|&&(a, b)| status(truth, a, b) != status(learned, a, b)).count();
    Ok(StructureDistance {
        missing: ts.difference(&ls).count(),
        extra: ls.difference(&ts).count(),
        misoriented,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dag(n: usize, e: &[(usize, usize)]) -> Dag {
        Dag::from_edges(n, e.iter().copied()).unwrap()
    }

    #[test]
    fn single_arc_is_undirected() {
        let p = to_pdag(&dag(2, &[(0, 1)]));
        assert!(p.directed.is_empty());
        assert_eq!(p.undirected, BTreeSet::from([(0, 1)]));
    }

    #[test]
    fn collider_stays_directed() {
        let p = to_pdag(&dag(3, &[(0, 2), (1, 2)]));
        assert_eq!(p.directed, BTreeSet::from([(0, 2), (1, 2)]));
        assert!(p.undirected.is_empty());
    }

    #[test]
    fn opposite_chains_agree() {
        assert_eq!(to_pdag(&dag(3, &[(0, 1), (1, 2)])), to_pdag(&dag(3, &[(2, 1), (1, 0)])));
    }

    #[test]
    fn first_rule_propagates_below_collider() {
        // 0 -> 2 <- 1 and 2 - 3 must become 2 -> 3
        let p = to_pdag(&dag(4, &[(0, 2), (1, 2), (2, 3)]));
        assert!(p.directed.contains(&(2, 3)));
    }

    #[test]
    fn distances() {
        let line = to_pdag(&dag(2, &[(0, 1)]));
        let empty = to_pdag(&Dag::empty(2));
        let arc = Pdag { n: 2, directed: BTreeSet::from([(0, 1)]), undirected: BTreeSet::new() };
        assert!(structure_distance(&line, &line).unwrap().is_zero());
        assert_eq!(structure_distance(&line, &empty).unwrap(), StructureDistance { missing: 1, extra: 0, misoriented: 0 });
        assert_eq!(structure_distance(&empty, &line).unwrap(), StructureDistance { missing: 0, extra: 1, misoriented: 0 });
        assert_eq!(structure_distance(&line, &arc).unwrap().misoriented, 1);
        assert!(structure_distance(&line, &to_pdag(&Dag::empty(3))).is_err());
    }
}
