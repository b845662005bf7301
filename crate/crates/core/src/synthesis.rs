//! Building a race-free model from an irredundant constraint system.
//!
//! Every bound source gets a candidate clock reset at that event (the
//! origin's clock is never reset). A candidate is done once its latest
//! guarded event has fired, so two candidates can share a physical clock
//! when one's window ends before the other's begins; the conflict graph
//! makes that precise and a greedy coloring picks the sharing.

use fixedbitset::FixedBitSet;

use crate::clock::ClockId;
use crate::constraints::{Bound, DifferenceConstraintSystem, TimePoint};
use crate::event::EventId;
use crate::tpo::{Guard, GuardConjunct, Tpo};

/// A candidate clock: reset at `source` (or never, for the origin), used by
/// the guards its `bounds` induce.
#[derive(Debug, Clone)]
pub struct CandidateClock {
    pub source: TimePoint,
    /// The bounds this clock enforces (all share `source`).
    pub bounds: Vec<Bound>,
    /// Maximal elements of the guarded-event set. A single element in the
    /// usual case; several when the guarded events are incomparable, in
    /// which case every one of them is treated as a use point.
    pub latest: Vec<EventId>,
}

/// Undirected conflict graph over candidate clocks.
#[derive(Debug, Clone)]
pub struct ClockAllocationGraph {
    candidates: Vec<CandidateClock>,
    adjacency: Vec<FixedBitSet>,
}

impl ClockAllocationGraph {
    pub fn candidates(&self) -> &[CandidateClock] {
        &self.candidates
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.candidates.len() {
            for j in self.adjacency[i].ones() {
                if j > i {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(b)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].count_ones(..)
    }

    /// Max degree Δ; greedy coloring needs at most 1 + Δ colors.
    pub fn max_degree(&self) -> usize {
        (0..self.candidates.len())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    pub fn candidate_for(&self, source: TimePoint) -> Option<usize> {
        self.candidates.iter().position(|c| c.source == source)
    }
}

/// Color assignment for the candidates of a [`ClockAllocationGraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub assignment: Vec<usize>,
    pub colors: usize,
}

/// Groups the system's non-trivial bounds by source and computes latest
/// guarded events and conflict edges.
pub fn allocate_clocks(sys: &DifferenceConstraintSystem) -> ClockAllocationGraph {
    let order = sys.order();

    let mut sources: Vec<TimePoint> = sys
        .bounds()
        .iter()
        .filter(|b| !b.is_trivial())
        .map(|b| b.source)
        .collect();
    sources.sort();
    sources.dedup();

    let mut candidates = Vec::with_capacity(sources.len());
    for source in sources {
        let bounds: Vec<Bound> = sys
            .bounds()
            .iter()
            .filter(|b| !b.is_trivial() && b.source == source)
            .cloned()
            .collect();
        let mut targets: Vec<EventId> = bounds.iter().map(|b| b.target).collect();
        targets.sort();
        targets.dedup();
        let latest = order.maximal_elements(&targets);
        if latest.len() > 1 {
            log::warn!(
                "clock for {source} guards {} incomparable maximal events; treating each as a use point",
                latest.len()
            );
        }
        candidates.push(CandidateClock {
            source,
            bounds,
            latest,
        });
    }

    let k = candidates.len();
    let mut adjacency = vec![FixedBitSet::with_capacity(k); k];
    for i in 0..k {
        for j in (i + 1)..k {
            let i_done_before_j =
                window_closes_before(order, &candidates[i].latest, candidates[j].source);
            let j_done_before_i =
                window_closes_before(order, &candidates[j].latest, candidates[i].source);
            if !i_done_before_j && !j_done_before_i {
                adjacency[i].insert(j);
                adjacency[j].insert(i);
            }
        }
    }

    ClockAllocationGraph {
        candidates,
        adjacency,
    }
}

/// Whether every last use of a candidate happens at or before `reset`, so
/// the clock can be re-used from that reset on. Nothing closes before the
/// origin.
fn window_closes_before(
    order: &crate::order::PartialOrder,
    latest: &[EventId],
    reset: TimePoint,
) -> bool {
    match reset {
        TimePoint::Origin => false,
        TimePoint::Event(r) => latest.iter().all(|&l| order.precedes_eq(l, r)),
    }
}

/// Greedy coloring, visiting vertices by descending degree (index as tie
/// break), assigning each the smallest color unused among its neighbors.
/// Uses at most `1 + Δ` colors and is deterministic.
pub fn color(graph: &ClockAllocationGraph) -> Coloring {
    let k = graph.candidates.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| graph.degree(b).cmp(&graph.degree(a)).then(a.cmp(&b)));

    let mut assignment = vec![usize::MAX; k];
    let mut colors = 0;
    for v in order {
        let mut used = vec![false; colors + 1];
        for w in graph.adjacency[v].ones() {
            if assignment[w] != usize::MAX && assignment[w] < used.len() {
                used[assignment[w]] = true;
            }
        }
        let c = (0..).find(|&c| c >= used.len() || !used[c]).unwrap();
        assignment[v] = c;
        colors = colors.max(c + 1);
    }
    Coloring { assignment, colors }
}

/// Builds the model: one physical clock per color, reset at every event
/// whose candidate wears that color (the origin contributes no reset; the
/// initial all-zero valuation stands in for it), guards placed at the bound
/// targets with the physical clock substituted.
///
/// Panics if the coloring is not proper for the graph.
pub fn assemble_tpo(
    sys: &DifferenceConstraintSystem,
    graph: &ClockAllocationGraph,
    coloring: &Coloring,
) -> Tpo {
    for (a, b) in graph.edges() {
        assert_ne!(
            coloring.assignment[a], coloring.assignment[b],
            "conflicting candidates {a} and {b} share a color"
        );
    }
    let order = sys.order().clone();
    let n = order.len();
    let mut guards: Vec<Vec<GuardConjunct>> = vec![Vec::new(); n];
    let mut resets: Vec<Vec<ClockId>> = vec![Vec::new(); n];

    for (i, cand) in graph.candidates.iter().enumerate() {
        let clock = ClockId(coloring.assignment[i]);
        if let TimePoint::Event(e) = cand.source {
            resets[e.0].push(clock);
        }
        for b in &cand.bounds {
            let conj = GuardConjunct {
                clock,
                relation: b.relation,
                constant: b.constant,
            };
            if !guards[b.target.0].contains(&conj) {
                guards[b.target.0].push(conj);
            }
        }
    }

    let guards = guards.into_iter().map(Guard::new).collect();
    let tpo =
        Tpo::new(order, coloring.colors, guards, resets).expect("assembled tables are well formed");
    assert!(
        tpo.is_race_free(),
        "assembly from a proper coloring must be race-free"
    );
    tpo
}

/// The full synthesis pipeline for an already-irredundant system.
pub fn synthesize(sys: &DifferenceConstraintSystem) -> Tpo {
    let graph = allocate_clocks(sys);
    let coloring = color(&graph);
    assemble_tpo(sys, &graph, &coloring)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{Relation, ToleranceSpec};
    use crate::order::PartialOrder;
    use crate::samples;

    fn e(i: usize) -> EventId {
        EventId(i)
    }

    #[test]
    fn windshield_reduced_allocation_golden() {
        let sys = samples::windshield_reduced_constraints();
        let g = allocate_clocks(&sys);

        let sources: Vec<TimePoint> = g.candidates().iter().map(|c| c.source).collect();
        assert_eq!(
            sources,
            vec![
                TimePoint::Event(e(0)),
                TimePoint::Event(e(3)),
                TimePoint::Event(e(4)),
            ]
        );
        assert_eq!(g.candidates()[0].latest, vec![e(4)]);
        assert_eq!(g.candidates()[1].latest, vec![e(5)]);
        assert_eq!(g.candidates()[2].latest, vec![e(5)]);
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn windshield_reduced_coloring_golden() {
        let sys = samples::windshield_reduced_constraints();
        let g = allocate_clocks(&sys);
        let coloring = color(&g);
        assert_eq!(coloring.colors, 2);
        // The clocks reset at events 0 and 4 share a color.
        assert_eq!(coloring.assignment[0], coloring.assignment[2]);
        assert_ne!(coloring.assignment[0], coloring.assignment[1]);
    }

    #[test]
    fn windshield_reduced_assembly_golden() {
        let sys = samples::windshield_reduced_constraints();
        let g = allocate_clocks(&sys);
        let coloring = color(&g);
        let tpo = assemble_tpo(&sys, &g, &coloring);

        assert_eq!(tpo.clocks(), 2);
        let shared = ClockId(coloring.assignment[0]);
        let solo = ClockId(coloring.assignment[1]);

        // Resets: shared clock at events 0 and 4, the other at event 3.
        assert_eq!(tpo.resets(e(0)), &[shared]);
        assert_eq!(tpo.resets(e(3)), &[solo]);
        assert_eq!(tpo.resets(e(4)), &[shared]);

        // Guard table with the merged clock substituted.
        let expect = [
            (2, shared, Relation::Ge, 10.0),
            (4, shared, Relation::Le, 15.0),
            (4, solo, Relation::Ge, 5.0),
            (5, solo, Relation::Ge, 4.0),
            (5, solo, Relation::Le, 10.0),
            (5, shared, Relation::Le, 8.0),
        ];
        let total: usize = (0..6).map(|i| tpo.guard(e(i)).conjuncts().len()).sum();
        assert_eq!(total, expect.len());
        for (ev, clock, relation, constant) in expect {
            assert!(
                tpo.guard(e(ev))
                    .conjuncts()
                    .iter()
                    .any(|c| c.clock == clock && c.relation == relation && c.constant == constant),
                "missing guard at event {ev}: {clock} {relation:?} {constant}"
            );
        }
        assert!(tpo.is_race_free());

        // Round trip: the assembled model admits exactly the input system.
        let back = tpo.to_constraints().unwrap();
        assert!(back.equivalent(&sys, ToleranceSpec::absolute(1e-9)));
    }

    #[test]
    fn absolute_bounds_only_need_one_unreset_clock() {
        let order = PartialOrder::chain(3);
        let sys = DifferenceConstraintSystem::new(
            order,
            vec![
                Bound::upper(TimePoint::Origin, e(1), 4.0),
                Bound::upper(TimePoint::Origin, e(2), 9.0),
            ],
        )
        .unwrap();
        let g = allocate_clocks(&sys);
        assert_eq!(g.candidates().len(), 1);
        assert_eq!(g.candidates()[0].source, TimePoint::Origin);
        assert!(g.edges().is_empty());
        let tpo = synthesize(&sys);
        assert_eq!(tpo.clocks(), 1);
        for i in 0..3 {
            assert!(tpo.resets(e(i)).is_empty());
        }
    }

    #[test]
    fn one_source_with_two_bounds_is_one_candidate() {
        let order = PartialOrder::chain(3);
        let sys = DifferenceConstraintSystem::new(
            order,
            vec![
                Bound::upper(TimePoint::Event(e(0)), e(1), 3.0),
                Bound::upper(TimePoint::Event(e(0)), e(2), 8.0),
            ],
        )
        .unwrap();
        let g = allocate_clocks(&sys);
        assert_eq!(g.candidates().len(), 1);
        assert_eq!(g.candidates()[0].bounds.len(), 2);
        assert_eq!(g.candidates()[0].latest, vec![e(2)]);
        assert_eq!(synthesize(&sys).clocks(), 1);
    }

    #[test]
    fn three_disjoint_chains_conflict_pairwise() {
        // Chains 0≺1, 2≺3, 4≺5: windows overlap pairwise, so 3 colors.
        let order =
            PartialOrder::from_edges(6, [(e(0), e(1)), (e(2), e(3)), (e(4), e(5))]).unwrap();
        let sys = DifferenceConstraintSystem::new(
            order,
            vec![
                Bound::upper(TimePoint::Event(e(0)), e(1), 1.0),
                Bound::upper(TimePoint::Event(e(2)), e(3), 1.0),
                Bound::upper(TimePoint::Event(e(4)), e(5), 1.0),
            ],
        )
        .unwrap();
        let g = allocate_clocks(&sys);
        assert_eq!(g.edges().len(), 3);
        let coloring = color(&g);
        assert_eq!(coloring.colors, 3);
        assert!(coloring.colors <= 1 + g.max_degree());
    }

    #[test]
    fn sequential_windows_share_one_clock() {
        let order = PartialOrder::chain(4);
        let sys = DifferenceConstraintSystem::new(
            order,
            vec![
                Bound::upper(TimePoint::Event(e(0)), e(1), 2.0),
                Bound::upper(TimePoint::Event(e(1)), e(2), 2.0),
                Bound::upper(TimePoint::Event(e(2)), e(3), 2.0),
            ],
        )
        .unwrap();
        let g = allocate_clocks(&sys);
        assert!(g.edges().is_empty());
        assert_eq!(color(&g).colors, 1);
        assert_eq!(synthesize(&sys).clocks(), 1);
    }

    #[test]
    fn empty_system_synthesizes_zero_clocks() {
        let sys = DifferenceConstraintSystem::order_only(samples::windshield_order());
        let tpo = synthesize(&sys);
        assert_eq!(tpo.clocks(), 0);
        assert!((0..6).all(|i| tpo.guard(e(i)).is_trivial()));
    }
}
