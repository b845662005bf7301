//! Strict partial orders over an event alphabet, backed by a DAG.
//!
//! The full transitive closure is kept in bitset form so that `a ⪯ b`
//! queries are O(1); the transitive reduction is kept for display and
//! serialization.

use fixedbitset::FixedBitSet;

use crate::error::OrderError;
use crate::event::EventId;

/// A strict partial order (irreflexive, asymmetric, transitive) on events
/// `0..n`, stored as both its transitive closure and transitive reduction.
#[derive(Debug, Clone)]
pub struct PartialOrder {
    n: usize,
    /// `succ[i]` holds every j with i ≺ j (strict descendants).
    succ: Vec<FixedBitSet>,
    /// `pred[j]` holds every i with i ≺ j (strict ancestors).
    pred: Vec<FixedBitSet>,
    /// Covering edges of the reduction, each list sorted ascending.
    reduced: Vec<Vec<usize>>,
    /// One fixed topological order (Kahn with smallest-index tie break).
    topo: Vec<usize>,
}

impl PartialOrder {
    /// Builds the order generated by `edges` (transitive closure is taken).
    /// Fails if the edges contain a cycle or a self-loop.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (EventId, EventId)>,
    ) -> Result<Self, OrderError> {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            if a.0 >= n || b.0 >= n {
                return Err(OrderError::EdgeOutOfRange(a.0, b.0, n));
            }
            if a == b {
                return Err(OrderError::Reflexive(a));
            }
            adj[a.0].push(b.0);
        }
        Self::from_adjacency(n, adj)
    }

    /// Builds the order from a reachability relation given as bitset rows:
    /// `relation[i]` contains j iff i ≺ j. The relation must already be
    /// transitive and irreflexive (as produced by intersecting total orders).
    pub fn from_relation(n: usize, relation: Vec<FixedBitSet>) -> Result<Self, OrderError> {
        debug_assert_eq!(relation.len(), n);
        for (i, row) in relation.iter().enumerate() {
            if row.contains(i) {
                return Err(OrderError::Reflexive(EventId(i)));
            }
        }
        let adj: Vec<Vec<usize>> = relation.iter().map(|row| row.ones().collect()).collect();
        Self::from_adjacency(n, adj)
    }

    /// An empty order: no event precedes any other.
    pub fn discrete(n: usize) -> Self {
        Self::from_adjacency(n, vec![Vec::new(); n]).expect("no edges, no cycle")
    }

    /// The total order 0 ≺ 1 ≺ … ≺ n−1.
    pub fn chain(n: usize) -> Self {
        let edges = (1..n).map(|i| (EventId(i - 1), EventId(i)));
        Self::from_edges(n, edges).expect("a chain is acyclic")
    }

    fn from_adjacency(n: usize, adj: Vec<Vec<usize>>) -> Result<Self, OrderError> {
        let topo = toposort(n, &adj)?;

        // Closure by DP over reverse topological order.
        let mut succ = vec![FixedBitSet::with_capacity(n); n];
        for &v in topo.iter().rev() {
            let mut row = FixedBitSet::with_capacity(n);
            for &w in &adj[v] {
                row.insert(w);
                row.union_with(&succ[w]);
            }
            succ[v] = row;
        }
        let mut pred = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in succ.iter().enumerate() {
            for j in row.ones() {
                pred[j].insert(i);
            }
        }

        // Covering edge (i, j): i ≺ j with no k such that i ≺ k ≺ j.
        let mut reduced = vec![Vec::new(); n];
        for i in 0..n {
            for j in succ[i].ones() {
                let has_middle = succ[i].ones().any(|k| k != j && succ[k].contains(j));
                if !has_middle {
                    reduced[i].push(j);
                }
            }
        }

        Ok(PartialOrder {
            n,
            succ,
            pred,
            reduced,
            topo,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> {
        (0..self.n).map(EventId)
    }

    /// a ≺ b (strictly precedes).
    #[inline]
    pub fn precedes(&self, a: EventId, b: EventId) -> bool {
        self.succ[a.0].contains(b.0)
    }

    /// a ⪯ b (precedes or equal).
    #[inline]
    pub fn precedes_eq(&self, a: EventId, b: EventId) -> bool {
        a == b || self.precedes(a, b)
    }

    pub fn comparable(&self, a: EventId, b: EventId) -> bool {
        self.precedes(a, b) || self.precedes(b, a)
    }

    /// Strict ancestors of `e` as a bitset row.
    pub fn ancestors(&self, e: EventId) -> &FixedBitSet {
        &self.pred[e.0]
    }

    /// Strict descendants of `e` as a bitset row.
    pub fn descendants(&self, e: EventId) -> &FixedBitSet {
        &self.succ[e.0]
    }

    /// Number of events strictly between `a` and `b`: |{k | a ≺ k ≺ b}|.
    pub fn between_count(&self, a: EventId, b: EventId) -> usize {
        let mut mid = self.succ[a.0].clone();
        mid.intersect_with(&self.pred[b.0]);
        mid.count_ones(..)
    }

    /// All ordered pairs (a, b) with a ≺ b, ascending by (a, b).
    pub fn pairs(&self) -> impl Iterator<Item = (EventId, EventId)> + '_ {
        (0..self.n).flat_map(move |i| self.succ[i].ones().map(move |j| (EventId(i), EventId(j))))
    }

    /// Covering edges of the transitive reduction, ascending by (a, b).
    pub fn covering_edges(&self) -> impl Iterator<Item = (EventId, EventId)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.reduced[i]
                .iter()
                .map(move |&j| (EventId(i), EventId(j)))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.reduced.iter().map(|v| v.len()).sum()
    }

    /// A fixed topological order (deterministic for a given order).
    pub fn topological(&self) -> impl Iterator<Item = EventId> + '_ {
        self.topo.iter().map(|&i| EventId(i))
    }

    /// Rank of each event in [`Self::topological`].
    pub fn topological_ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.n];
        for (r, &v) in self.topo.iter().enumerate() {
            rank[v] = r;
        }
        rank
    }

    /// The maximal elements of `set` (no other member strictly after them).
    pub fn maximal_elements(&self, set: &[EventId]) -> Vec<EventId> {
        set.iter()
            .copied()
            .filter(|&e| !set.iter().any(|&o| self.precedes(e, o)))
            .collect()
    }
}

impl PartialEq for PartialOrder {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.succ == other.succ
    }
}

impl Eq for PartialOrder {}

/// Kahn's algorithm with a smallest-index frontier, so the result is the
/// lexicographically least topological order.
fn toposort(n: usize, adj: &[Vec<usize>]) -> Result<Vec<usize>, OrderError> {
    let mut indegree = vec![0usize; n];
    for out in adj {
        for &w in out {
            indegree[w] += 1;
        }
    }
    let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = indegree
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == 0)
        .map(|(i, _)| std::cmp::Reverse(i))
        .collect();
    let mut topo = Vec::with_capacity(n);
    while let Some(std::cmp::Reverse(v)) = ready.pop() {
        topo.push(v);
        for &w in &adj[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(std::cmp::Reverse(w));
            }
        }
    }
    if topo.len() != n {
        let stuck = indegree.iter().position(|&d| d > 0).unwrap_or(0);
        return Err(OrderError::Cycle(EventId(stuck)));
    }
    Ok(topo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(i: usize) -> EventId {
        EventId(i)
    }

    /// Brute-force reachability by DFS, the oracle for the bitset closure.
    fn dfs_closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
        }
        let mut reach = vec![vec![false; n]; n];
        for s in 0..n {
            let mut stack = vec![s];
            let mut seen = vec![false; n];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        reach[s][w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        reach
    }

    #[test]
    fn closure_matches_dfs_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(1..=12);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(0.3) {
                        edges.push((i, j));
                    }
                }
            }
            let po = PartialOrder::from_edges(n, edges.iter().map(|&(a, b)| (e(a), e(b)))).unwrap();
            let oracle = dfs_closure(n, &edges);
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(po.precedes(e(i), e(j)), oracle[i][j], "pair ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn reduction_is_minimal_and_equivalent() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let n = rng.gen_range(2..=10);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(0.4) {
                        edges.push((e(i), e(j)));
                    }
                }
            }
            let po = PartialOrder::from_edges(n, edges).unwrap();
            let red: Vec<_> = po.covering_edges().collect();
            // Same closure when rebuilt from the reduction alone.
            let rebuilt = PartialOrder::from_edges(n, red.clone()).unwrap();
            assert_eq!(po, rebuilt);
            // Dropping any covering edge loses reachability.
            for skip in 0..red.len() {
                let fewer = red
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &p)| p);
                let smaller = PartialOrder::from_edges(n, fewer).unwrap();
                assert_ne!(po, smaller, "edge {:?} should be essential", red[skip]);
            }
        }
    }

    #[test]
    fn cycle_is_rejected() {
        let err = PartialOrder::from_edges(3, [(e(0), e(1)), (e(1), e(2)), (e(2), e(0))]);
        assert!(matches!(err, Err(OrderError::Cycle(_))));
    }

    #[test]
    fn between_count_on_a_chain() {
        let po = PartialOrder::chain(5);
        assert_eq!(po.between_count(e(0), e(4)), 3);
        assert_eq!(po.between_count(e(0), e(1)), 0);
        assert!(po.precedes(e(0), e(4)));
        assert!(!po.precedes(e(4), e(0)));
    }

    #[test]
    fn maximal_elements_of_a_fork() {
        // 0 ≺ 1, 0 ≺ 2, with 1 and 2 incomparable.
        let po = PartialOrder::from_edges(3, [(e(0), e(1)), (e(0), e(2))]).unwrap();
        let m = po.maximal_elements(&[e(0), e(1), e(2)]);
        assert_eq!(m, vec![e(1), e(2)]);
        assert_eq!(po.maximal_elements(&[e(0), e(1)]), vec![e(1)]);
    }
}
