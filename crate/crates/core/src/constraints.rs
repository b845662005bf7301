//! Difference-constraint systems over event times, with feasibility,
//! optimization of `t_j - t_i` objectives, and redundancy elimination.
//!
//! Optimization is exact: the maximum of `t_j - t_i` over a feasible
//! difference-constraint system equals the shortest-path distance from i to
//! j in the constraint graph (an upper bound `t_b - t_a <= c` is an arc
//! a -> b of weight c, a lower bound is the reversed arc with negated
//! weight). A negative cycle means the system is infeasible.

use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::event::EventId;
use crate::order::PartialOrder;

/// Either the fictitious origin (pinned at time 0, before every event) or a
/// real event. Absolute bounds `t_j ⋈ a` are difference bounds against the
/// origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimePoint {
    Origin,
    Event(EventId),
}

impl TimePoint {
    /// Node index in the constraint graph: origin is 0, event i is i + 1.
    #[inline]
    fn node(self) -> usize {
        match self {
            TimePoint::Origin => 0,
            TimePoint::Event(e) => e.0 + 1,
        }
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimePoint::Origin => write!(f, "t0"),
            TimePoint::Event(e) => write!(f, "t{}", e.0 + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Le,
    Ge,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One inequality `t_target - t_source ⋈ constant` (with `t_source = 0`
/// when the source is the origin).
#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub source: TimePoint,
    pub target: EventId,
    pub relation: Relation,
    pub constant: f64,
}

impl Bound {
    pub fn upper(source: TimePoint, target: EventId, constant: f64) -> Self {
        Bound {
            source,
            target,
            relation: Relation::Le,
            constant,
        }
    }

    pub fn lower(source: TimePoint, target: EventId, constant: f64) -> Self {
        Bound {
            source,
            target,
            relation: Relation::Ge,
            constant,
        }
    }

    /// Trivial bounds carry no information beyond the order itself:
    /// a lower bound of 0 or an infinite upper bound.
    pub fn is_trivial(&self) -> bool {
        match self.relation {
            Relation::Le => self.constant.is_infinite(),
            Relation::Ge => self.constant <= 0.0,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = TimePoint::Event(self.target);
        match self.source {
            TimePoint::Origin => write!(f, "{} {} {}", t, self.relation, self.constant),
            s => write!(f, "{} - {} {} {}", t, s, self.relation, self.constant),
        }
    }
}

/// Result of optimizing `t_j - t_i` over the feasible region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimum {
    Finite(f64),
    /// Unbounded in the optimization direction (+inf for max, -inf for min).
    Unbounded,
    /// The feasible region is empty.
    Infeasible,
}

impl Optimum {
    pub fn finite(self) -> Option<f64> {
        match self {
            Optimum::Finite(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

/// Processing order for redundancy elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    /// Ascending number of events strictly between source and target.
    Nearest,
    /// Descending number of events strictly between source and target.
    Distant,
    /// Uniformly shuffled order from the given seed.
    Random { seed: u64 },
    /// Per-source groups in reverse topological order; a group is dropped
    /// only if every bound in it is redundant, otherwise kept whole.
    Sound,
}

/// Tolerance for redundancy and entailment checks. The effective slack for
/// a bound is `max(absolute, width_fraction * width)` where `width` is the
/// extent of the interval mined for that pair. Plain systems use a pure
/// absolute tolerance (`width_fraction = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSpec {
    pub absolute: f64,
    pub width_fraction: f64,
}

impl ToleranceSpec {
    pub const fn absolute(tol: f64) -> Self {
        ToleranceSpec {
            absolute: tol,
            width_fraction: 0.0,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        ToleranceSpec {
            absolute: self.absolute * factor,
            width_fraction: self.width_fraction * factor,
        }
    }
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        ToleranceSpec::absolute(DEFAULT_TOLERANCE)
    }
}

/// Default absolute slack for redundancy tests; path sums accumulate
/// floating-point rounding.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// One inequality participating in an infeasibility witness.
#[derive(Debug, Clone, PartialEq)]
pub enum CycleEdge {
    Bound(Bound),
    /// `t_after >= t_before` from the precedence order.
    OrderEdge {
        before: EventId,
        after: EventId,
    },
    /// `t_event >= 0`.
    NonNegative(EventId),
}

impl fmt::Display for CycleEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycleEdge::Bound(b) => write!(f, "{}", b),
            CycleEdge::OrderEdge { before, after } => write!(
                f,
                "{} - {} >= 0",
                TimePoint::Event(*after),
                TimePoint::Event(*before)
            ),
            CycleEdge::NonNegative(e) => write!(f, "{} >= 0", TimePoint::Event(*e)),
        }
    }
}

/// A set of inequalities whose weights sum to a negative value: a proof
/// that the system admits no solution.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeCycle {
    pub edges: Vec<CycleEdge>,
}

impl fmt::Display for NegativeCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in &self.edges {
            if !first {
                write!(f, " and ")?;
            }
            write!(f, "{}", e)?;
            first = false;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstraintError {
    #[error("bound targets event {0} but the order has {1} events")]
    TargetOutOfRange(usize, usize),
    #[error("bound source event {0} is out of range for {1} events")]
    SourceOutOfRange(usize, usize),
    #[error("difference bound on ({0}, {1}) does not respect the precedence order")]
    UnorderedPair(EventId, EventId),
    #[error("bound constant {0} is invalid: lower bounds must be finite and >= 0, upper bounds >= 0 or +inf")]
    BadConstant(f64),
    #[error("system is infeasible; contradicting inequalities: {0}")]
    Infeasible(NegativeCycle),
}

/// A conjunction of difference bounds over the events of a partial order.
///
/// The semantics always include the order constraints: `t_j - t_i >= 0` for
/// every ordered pair and `t_j >= 0` for every event. Stored bounds are a
/// multiset; duplicates are kept until elimination removes them.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceConstraintSystem {
    order: PartialOrder,
    bounds: Vec<Bound>,
}

/// Result of [`DifferenceConstraintSystem::eliminate_redundancy`].
#[derive(Debug, Clone)]
pub struct Elimination {
    pub system: DifferenceConstraintSystem,
    /// Bounds removed by the one-at-a-time redundancy test, in removal order.
    pub removed: Vec<Bound>,
    /// Bounds dropped up front as trivial (zero lower / infinite upper).
    pub trivial: Vec<Bound>,
}

impl DifferenceConstraintSystem {
    pub fn new(order: PartialOrder, bounds: Vec<Bound>) -> Result<Self, ConstraintError> {
        let n = order.len();
        for b in &bounds {
            if b.target.0 >= n {
                return Err(ConstraintError::TargetOutOfRange(b.target.0, n));
            }
            if let TimePoint::Event(s) = b.source {
                if s.0 >= n {
                    return Err(ConstraintError::SourceOutOfRange(s.0, n));
                }
                if !order.precedes(s, b.target) {
                    return Err(ConstraintError::UnorderedPair(s, b.target));
                }
            }
            let ok = match b.relation {
                Relation::Le => b.constant >= 0.0 && !b.constant.is_nan(),
                Relation::Ge => b.constant.is_finite() && b.constant >= 0.0,
            };
            if !ok {
                return Err(ConstraintError::BadConstant(b.constant));
            }
        }
        Ok(DifferenceConstraintSystem { order, bounds })
    }

    /// The order's constraints alone (ψ of the precedence relation).
    pub fn order_only(order: PartialOrder) -> Self {
        DifferenceConstraintSystem {
            order,
            bounds: Vec::new(),
        }
    }

    pub fn order(&self) -> &PartialOrder {
        &self.order
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    /// Optimum of `t_target - t_source` over the feasible region (with the
    /// order constraints included and `t_0 = 0` pinned).
    pub fn optimize(&self, source: TimePoint, target: TimePoint, sense: Sense) -> Optimum {
        let mut solver = match Solver::build(self, true) {
            Ok(s) => s,
            Err(_) => return Optimum::Infeasible,
        };
        solver.extremum(source, target, sense)
    }

    /// Errs with a negative-cycle witness iff the region is empty.
    pub fn check_feasible(&self) -> Result<(), NegativeCycle> {
        Solver::build(self, true).map(|_| ())
    }

    /// Whether the time vector `times` (indexed by event id) satisfies every
    /// bound and the order constraints, within `tol`.
    pub fn satisfies(&self, times: &[f64], tol: f64) -> bool {
        if times.len() != self.order.len() {
            return false;
        }
        if times.iter().any(|t| *t < -tol) {
            return false;
        }
        for (i, j) in self.order.pairs() {
            if times[j.0] - times[i.0] < -tol {
                return false;
            }
        }
        self.bounds.iter().all(|b| {
            let diff = match b.source {
                TimePoint::Origin => times[b.target.0],
                TimePoint::Event(s) => times[b.target.0] - times[s.0],
            };
            match b.relation {
                Relation::Le => diff <= b.constant + tol,
                Relation::Ge => diff >= b.constant - tol,
            }
        })
    }

    /// Removes trivial bounds, then greedily removes each bound that the
    /// remaining explicit bounds already entail, processing in the
    /// heuristic's order. The redundancy test deliberately optimizes over
    /// the explicit bounds alone (not the order constraints), so the
    /// surviving set is exactly the set a clock allocation has to enforce.
    pub fn eliminate_redundancy(
        &self,
        heuristic: Heuristic,
        tol: ToleranceSpec,
    ) -> Result<Elimination, ConstraintError> {
        // Infeasibility is reported against the full semantics.
        Solver::build(self, true).map_err(ConstraintError::Infeasible)?;

        let mut trivial = Vec::new();
        let mut kept_input = Vec::new();
        for b in &self.bounds {
            if b.is_trivial() {
                trivial.push(b.clone());
            } else {
                kept_input.push(b.clone());
            }
        }

        let work = DifferenceConstraintSystem {
            order: self.order.clone(),
            bounds: kept_input,
        };
        let mut solver = Solver::build(&work, false).expect("relaxation of a feasible system");
        let widths = PairWidths::new(&work.bounds);
        let removed_flags = match heuristic {
            Heuristic::Sound => run_sound(&work, &mut solver, &widths, tol),
            _ => {
                let order_ix = heuristic_order(&work, heuristic);
                run_one_at_a_time(&work, &mut solver, &widths, tol, &order_ix)
            }
        };

        let mut survivors = Vec::new();
        let mut removed = Vec::new();
        for (i, b) in work.bounds.iter().enumerate() {
            if removed_flags[i] {
                removed.push(b.clone());
            } else {
                survivors.push(b.clone());
            }
        }
        Ok(Elimination {
            system: DifferenceConstraintSystem {
                order: self.order.clone(),
                bounds: survivors,
            },
            removed,
            trivial,
        })
    }

    /// True iff both systems admit exactly the same time vectors: every
    /// bound of each side (and the shared order constraints) is entailed by
    /// the other side, within `tol`.
    pub fn equivalent(&self, other: &Self, tol: ToleranceSpec) -> bool {
        if self.order != other.order {
            return false;
        }
        let a_feasible = Solver::build(self, true);
        let b_feasible = Solver::build(other, true);
        match (a_feasible, b_feasible) {
            (Err(_), Err(_)) => return true,
            (Err(_), Ok(_)) | (Ok(_), Err(_)) => return false,
            (Ok(_), Ok(_)) => {}
        }
        entails_all(other, self, tol) && entails_all(self, other, tol)
    }
}

/// Whether `by` entails every non-trivial bound of `bounds_of` within `tol`.
fn entails_all(
    by: &DifferenceConstraintSystem,
    bounds_of: &DifferenceConstraintSystem,
    tol: ToleranceSpec,
) -> bool {
    let mut solver = match Solver::build(by, true) {
        Ok(s) => s,
        Err(_) => return true,
    };
    let widths = PairWidths::new(&bounds_of.bounds);
    bounds_of.bounds.iter().all(|b| {
        if b.is_trivial() {
            return true;
        }
        let slack = widths.tolerance_for(b, tol);
        match entailed(&mut solver, b, slack) {
            Entailment::Holds => true,
            Entailment::Violated => false,
        }
    })
}

enum Entailment {
    Holds,
    Violated,
}

fn entailed(solver: &mut Solver, bound: &Bound, slack: f64) -> Entailment {
    let target = TimePoint::Event(bound.target);
    match bound.relation {
        Relation::Le => match solver.extremum(bound.source, target, Sense::Max) {
            Optimum::Finite(v) if v <= bound.constant + slack => Entailment::Holds,
            Optimum::Infeasible => Entailment::Holds,
            _ => Entailment::Violated,
        },
        Relation::Ge => match solver.extremum(bound.source, target, Sense::Min) {
            Optimum::Finite(v) if v >= bound.constant - slack => Entailment::Holds,
            Optimum::Infeasible => Entailment::Holds,
            _ => Entailment::Violated,
        },
    }
}

/// Index order for the one-at-a-time heuristics. Ties break ascending on
/// (source, target, relation, position) so runs are reproducible.
fn heuristic_order(sys: &DifferenceConstraintSystem, heuristic: Heuristic) -> Vec<usize> {
    let mut ix: Vec<usize> = (0..sys.bounds.len()).collect();
    match heuristic {
        Heuristic::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            ix.shuffle(&mut rng);
        }
        Heuristic::Nearest | Heuristic::Distant => {
            let keys: Vec<usize> = sys.bounds.iter().map(|b| between_key(sys, b)).collect();
            let descending = heuristic == Heuristic::Distant;
            ix.sort_by(|&a, &b| {
                let ka = keys[a];
                let kb = keys[b];
                let primary = if descending { kb.cmp(&ka) } else { ka.cmp(&kb) };
                primary.then_with(|| tie_key(&sys.bounds[a]).cmp(&tie_key(&sys.bounds[b])))
            });
        }
        Heuristic::Sound => unreachable!("sound is group-based"),
    }
    ix
}

fn between_key(sys: &DifferenceConstraintSystem, b: &Bound) -> usize {
    match b.source {
        TimePoint::Origin => sys.order.ancestors(b.target).count_ones(..),
        TimePoint::Event(s) => sys.order.between_count(s, b.target),
    }
}

fn tie_key(b: &Bound) -> (TimePoint, EventId, Relation) {
    (b.source, b.target, b.relation)
}

fn run_one_at_a_time(
    sys: &DifferenceConstraintSystem,
    solver: &mut Solver,
    widths: &PairWidths,
    tol: ToleranceSpec,
    order_ix: &[usize],
) -> Vec<bool> {
    let mut removed = vec![false; sys.bounds.len()];
    for &i in order_ix {
        let b = &sys.bounds[i];
        solver.set_active(i, false);
        let slack = widths.tolerance_for(b, tol);
        match entailed(solver, b, slack) {
            Entailment::Holds => removed[i] = true,
            Entailment::Violated => solver.set_active(i, true),
        }
    }
    removed
}

/// SOUND: walk source events from the end of a topological order (the
/// origin last) and test each source's bounds as a batch, farthest target
/// first. Working backwards keeps a clock's late, long-range bounds under
/// test while the short bounds that entail them are still present, so a
/// source whose constraints are all implied loses its clock entirely.
fn run_sound(
    sys: &DifferenceConstraintSystem,
    solver: &mut Solver,
    widths: &PairWidths,
    tol: ToleranceSpec,
) -> Vec<bool> {
    let mut by_source: Vec<Vec<usize>> = vec![Vec::new(); sys.order.len() + 1];
    for (i, b) in sys.bounds.iter().enumerate() {
        by_source[b.source.node()].push(i);
    }
    for group in &mut by_source {
        group.sort_by(|&a, &b| {
            let ba = &sys.bounds[a];
            let bb = &sys.bounds[b];
            bb.target
                .cmp(&ba.target)
                .then(ba.relation.cmp(&bb.relation))
                .then(a.cmp(&b))
        });
    }

    let mut sources: Vec<usize> = sys.order.topological().map(|e| e.0 + 1).collect();
    sources.reverse();
    sources.push(TimePoint::Origin.node());

    let mut order_ix = Vec::with_capacity(sys.bounds.len());
    for s in sources {
        order_ix.extend_from_slice(&by_source[s]);
    }
    run_one_at_a_time(sys, solver, widths, tol, &order_ix)
}

/// Mined interval widths per (source, target) pair, used to scale
/// redundancy slack to the data.
struct PairWidths {
    spans: std::collections::HashMap<(TimePoint, EventId), (f64, f64)>,
}

impl PairWidths {
    fn new(bounds: &[Bound]) -> Self {
        let mut spans: std::collections::HashMap<(TimePoint, EventId), (f64, f64)> =
            std::collections::HashMap::new();
        for b in bounds {
            let entry = spans
                .entry((b.source, b.target))
                .or_insert((0.0, f64::INFINITY));
            match b.relation {
                Relation::Ge => entry.0 = entry.0.max(b.constant),
                Relation::Le => entry.1 = entry.1.min(b.constant),
            }
        }
        PairWidths { spans }
    }

    fn tolerance_for(&self, b: &Bound, tol: ToleranceSpec) -> f64 {
        if tol.width_fraction == 0.0 {
            return tol.absolute;
        }
        let width = match self.spans.get(&(b.source, b.target)) {
            Some(&(lo, hi)) if hi.is_finite() => (hi - lo).max(0.0),
            _ => b.constant.abs().max(1.0),
        };
        tol.absolute.max(tol.width_fraction * width)
    }
}

#[derive(Clone, Copy)]
struct Edge {
    to: u32,
    weight: f64,
    /// Index into the bound list, or NO_BOUND for order/non-negativity arcs.
    tag: u32,
}

/// Shortest-path machinery over the constraint graph. Node 0 is the origin;
/// event i is node i + 1. Building the solver performs the feasibility
/// check (Bellman-Ford with a virtual source) and fails with a witness on a
/// negative cycle.
struct Solver {
    nodes: usize,
    adj: Vec<Vec<Edge>>,
    active: Vec<bool>,
    dist: Vec<f64>,
    in_queue: Vec<bool>,
    queue: VecDeque<usize>,
}

impl Solver {
    fn build(sys: &DifferenceConstraintSystem, with_order: bool) -> Result<Self, NegativeCycle> {
        let n = sys.order.len();
        let nodes = n + 1;
        let mut adj: Vec<Vec<Edge>> = vec![Vec::new(); nodes];
        let mut cycle_info: Vec<CycleEdge> = Vec::new();

        for (i, b) in sys.bounds.iter().enumerate() {
            if b.relation == Relation::Le && b.constant.is_infinite() {
                continue;
            }
            let s = b.source.node();
            let t = TimePoint::Event(b.target).node();
            let (from, to, w) = match b.relation {
                Relation::Le => (s, t, b.constant),
                Relation::Ge => (t, s, -b.constant),
            };
            adj[from].push(Edge {
                to: to as u32,
                weight: w,
                tag: i as u32,
            });
        }

        if with_order {
            // Covering edges are enough: longer order chains are path
            // compositions of these arcs.
            for (a, b) in sys.order.covering_edges() {
                let tag = (sys.bounds.len() + cycle_info.len()) as u32;
                cycle_info.push(CycleEdge::OrderEdge {
                    before: a,
                    after: b,
                });
                adj[TimePoint::Event(b).node()].push(Edge {
                    to: TimePoint::Event(a).node() as u32,
                    weight: 0.0,
                    tag,
                });
            }
            for e in sys.order.events() {
                let tag = (sys.bounds.len() + cycle_info.len()) as u32;
                cycle_info.push(CycleEdge::NonNegative(e));
                adj[TimePoint::Event(e).node()].push(Edge {
                    to: 0,
                    weight: 0.0,
                    tag,
                });
            }
        }

        let solver = Solver {
            nodes,
            adj,
            active: vec![true; sys.bounds.len()],
            dist: vec![0.0; nodes],
            in_queue: vec![false; nodes],
            queue: VecDeque::new(),
        };
        solver.check_no_negative_cycle(sys, &cycle_info)?;
        Ok(solver)
    }

    /// Bellman-Ford from a virtual source connected to every node with
    /// weight 0 (all distances start at 0). Extracts a cycle on failure.
    fn check_no_negative_cycle(
        &self,
        sys: &DifferenceConstraintSystem,
        cycle_info: &[CycleEdge],
    ) -> Result<(), NegativeCycle> {
        let mut dist = vec![0.0f64; self.nodes];
        let mut pred: Vec<Option<(usize, u32)>> = vec![None; self.nodes];
        let mut changed_node = None;
        for round in 0..self.nodes {
            let mut changed = false;
            for u in 0..self.nodes {
                let du = dist[u];
                for e in &self.adj[u] {
                    let v = e.to as usize;
                    let nd = du + e.weight;
                    if nd < dist[v] {
                        dist[v] = nd;
                        pred[v] = Some((u, e.tag));
                        changed = true;
                        if round == self.nodes - 1 {
                            changed_node = Some(v);
                        }
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
        let Some(mut x) = changed_node else {
            return Ok(());
        };
        // Walk back n+1 steps to guarantee landing inside the cycle.
        for _ in 0..self.nodes {
            x = pred[x].expect("relaxed node has a predecessor").0;
        }
        let start = x;
        let mut edges = Vec::new();
        loop {
            let (p, tag) = pred[x].expect("cycle nodes have predecessors");
            let edge = if (tag as usize) < sys.bounds.len() {
                CycleEdge::Bound(sys.bounds[tag as usize].clone())
            } else {
                cycle_info[tag as usize - sys.bounds.len()].clone()
            };
            edges.push(edge);
            x = p;
            if x == start {
                break;
            }
        }
        edges.reverse();
        Err(NegativeCycle { edges })
    }

    fn set_active(&mut self, bound: usize, active: bool) {
        self.active[bound] = active;
    }

    /// SPFA single-source shortest paths. Assumes no negative cycle among
    /// the active edges (holds throughout elimination: removals only relax).
    fn shortest_from(&mut self, src: usize) {
        self.dist.fill(f64::INFINITY);
        self.in_queue.fill(false);
        self.queue.clear();
        self.dist[src] = 0.0;
        self.queue.push_back(src);
        self.in_queue[src] = true;
        while let Some(u) = self.queue.pop_front() {
            self.in_queue[u] = false;
            let du = self.dist[u];
            for k in 0..self.adj[u].len() {
                let e = self.adj[u][k];
                if (e.tag as usize) < self.active.len() && !self.active[e.tag as usize] {
                    continue;
                }
                let v = e.to as usize;
                let nd = du + e.weight;
                if nd < self.dist[v] {
                    self.dist[v] = nd;
                    if !self.in_queue[v] {
                        self.queue.push_back(v);
                        self.in_queue[v] = true;
                    }
                }
            }
        }
    }

    /// Max or min of `t_target - t_source` assuming the system is feasible.
    fn extremum(&mut self, source: TimePoint, target: TimePoint, sense: Sense) -> Optimum {
        let (from, to) = match sense {
            Sense::Max => (source.node(), target.node()),
            Sense::Min => (target.node(), source.node()),
        };
        self.shortest_from(from);
        let d = self.dist[to];
        if d.is_infinite() {
            return Optimum::Unbounded;
        }
        match sense {
            Sense::Max => Optimum::Finite(d),
            Sense::Min => Optimum::Finite(-d),
        }
    }
}
