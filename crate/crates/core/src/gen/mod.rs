//! Seeded random generation of feasible race-free models and sampling of
//! conforming timed traces.
//!
//! Bounds are generated by propagating zones along the DAG: each event's
//! guard interval is drawn inside the zone reaching it, lower bounds sit
//! between the precedent zone bounds, upper bounds never shrink along a
//! path, and zones of joining branches are union-relaxed. Traces are
//! sampled directly from the model's difference-constraint system: with
//! the all-pairs minimal network in hand, fixing times one event at a time
//! inside the propagated interval can never dead-end on a feasible system.

pub mod zone;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::constraints::{Bound, DifferenceConstraintSystem, Relation, TimePoint, ToleranceSpec};
use crate::event::EventId;
use crate::order::PartialOrder;
use crate::synthesis;
use crate::tpo::Tpo;
use crate::trace::TimedTrace;
use zone::Zone;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("no feasible bound assignment found after {0} attempts")]
    Exhausted(usize),
    #[error("model cannot be sampled: {0}")]
    NotSampleable(String),
    #[error("sampling dead-ended after {0} retries")]
    DeadEnd(usize),
}

/// Random DAG on `n` events: each pair (i, j) with i < j becomes an edge
/// with probability `density`; the stored order keeps the transitive
/// reduction for display and the closure for queries.
pub fn random_dag(n: usize, density: f64, seed: u64) -> PartialOrder {
    assert!(n >= 1, "need at least one event");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                edges.push((EventId(i), EventId(j)));
            }
        }
    }
    PartialOrder::from_edges(n, edges).expect("forward edges cannot cycle")
}

/// Knobs for [`random_bounds`]; the defaults generate moderately tight
/// guards with a mix of one- and two-sided intervals.
#[derive(Debug, Clone, Copy)]
pub struct BoundProfile {
    /// Chance an event gets a guard at all.
    pub guard_prob: f64,
    /// Chance a guard carries a positive lower bound.
    pub lower_prob: f64,
    /// Chance a guard keeps a finite upper bound.
    pub upper_prob: f64,
    /// Range of the per-step interval span to draw from.
    pub span: (f64, f64),
}

impl Default for BoundProfile {
    fn default() -> Self {
        BoundProfile {
            guard_prob: 0.85,
            lower_prob: 0.35,
            upper_prob: 0.75,
            span: (2.0, 10.0),
        }
    }
}

/// Generates feasible timing bounds over `order` using at most
/// `clock_budget` clocks, then synthesizes the race-free model.
pub fn random_bounds(
    order: &PartialOrder,
    clock_budget: usize,
    seed: u64,
) -> Result<Tpo, GenError> {
    random_bounds_with(order, clock_budget, seed, BoundProfile::default())
}

pub fn random_bounds_with(
    order: &PartialOrder,
    clock_budget: usize,
    seed: u64,
    profile: BoundProfile,
) -> Result<Tpo, GenError> {
    assert!(clock_budget >= 1, "need at least one clock");
    const ATTEMPTS: usize = 8;
    let mut relax = 1.0;
    let mut lower_prob = profile.lower_prob;
    for attempt in 0..ATTEMPTS {
        let attempt_seed = seed ^ ((attempt as u64) << 48);
        let profile = BoundProfile {
            lower_prob,
            span: (profile.span.0 * relax, profile.span.1 * relax),
            ..profile
        };
        if let Some(tpo) = try_bounds(order, clock_budget, attempt_seed, profile) {
            return Ok(tpo);
        }
        relax *= 2.0;
        lower_prob *= 0.5;
    }
    Err(GenError::Exhausted(ATTEMPTS))
}

fn try_bounds(
    order: &PartialOrder,
    clock_budget: usize,
    seed: u64,
    profile: BoundProfile,
) -> Option<Tpo> {
    let n = order.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Anchors: sources for difference bounds, richest descendant sets first.
    let mut anchor_candidates: Vec<usize> = (0..n)
        .filter(|&e| order.descendants(EventId(e)).count_ones(..) > 0)
        .collect();
    anchor_candidates.sort_by(|&a, &b| {
        let da = order.descendants(EventId(a)).count_ones(..);
        let db = order.descendants(EventId(b)).count_ones(..);
        db.cmp(&da).then(a.cmp(&b))
    });
    let anchors: Vec<usize> = anchor_candidates
        .into_iter()
        .take(clock_budget.saturating_sub(1))
        .collect();
    let mut anchor_var = vec![usize::MAX; n];
    for (k, &a) in anchors.iter().enumerate() {
        anchor_var[a] = k + 2; // var 1 is the global clock
    }
    let vars = 1 + anchors.len();
    const GLOBAL: usize = 1;

    let mut prev_upper = vec![0.0f64; vars + 1];
    let mut zones: Vec<Option<Zone>> = vec![None; n];
    let mut bounds: Vec<Bound> = Vec::new();

    let mut parents_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, b) in order.covering_edges() {
        parents_of[b.0].push(a.0);
    }

    for e in order.topological() {
        let parents = &parents_of[e.0];
        let mut zone = if parents.is_empty() {
            Zone::origin(vars)
        } else {
            let mut z = zones[parents[0]].clone().expect("topological order");
            for &p in &parents[1..] {
                z.union_relax(zones[p].as_ref().expect("topological order"));
            }
            z
        };
        zone.elapse();
        zone.canonicalize();

        if rng.gen_bool(profile.guard_prob) {
            let mut choices = vec![GLOBAL];
            for a in order.ancestors(e).ones() {
                if anchor_var[a] != usize::MAX {
                    choices.push(anchor_var[a]);
                }
            }
            let var = choices[rng.gen_range(0..choices.len())];
            let span = rng.gen_range(profile.span.0..=profile.span.1);
            let (zone_lo, _) = zone.clock_range(var);

            let lower = if rng.gen_bool(profile.lower_prob) {
                zone_lo + rng.gen_range(0.2..=0.8) * span
            } else {
                0.0
            };
            let upper = if rng.gen_bool(profile.upper_prob) {
                let hi = prev_upper[var].max(lower) + rng.gen_range(0.5..=1.0) * span;
                prev_upper[var] = hi;
                hi
            } else {
                f64::INFINITY
            };

            if lower > 0.0 || upper.is_finite() {
                let mut constrained = zone.clone();
                constrained.constrain_clock(var, lower, upper);
                constrained.canonicalize();
                if constrained.is_empty() {
                    // Guard does not fit the reachable zone; drop it rather
                    // than deadlock the construction.
                } else {
                    zone = constrained;
                    let source = if var == GLOBAL {
                        TimePoint::Origin
                    } else {
                        TimePoint::Event(EventId(anchors[var - 2]))
                    };
                    if lower > 0.0 {
                        bounds.push(Bound::lower(source, e, lower));
                    }
                    if upper.is_finite() {
                        bounds.push(Bound::upper(source, e, upper));
                    }
                }
            }
        }

        if anchor_var[e.0] != usize::MAX {
            zone.reset(anchor_var[e.0]);
            zone.canonicalize();
        }
        zones[e.0] = Some(zone);
    }

    let sys = DifferenceConstraintSystem::new(order.clone(), bounds).ok()?;
    sys.check_feasible().ok()?;
    let reduced = sys
        .eliminate_redundancy(
            crate::constraints::Heuristic::Nearest,
            ToleranceSpec::default(),
        )
        .ok()?;
    let tpo = synthesis::synthesize(&reduced.system);
    debug_assert!(tpo.clocks() <= clock_budget);
    Some(tpo)
}

/// How delays are drawn inside each feasible interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DelayDistribution {
    #[default]
    Uniform,
    /// Normal centered on the interval midpoint (sd = width / 4), redrawn
    /// into the interval and clamped as a last resort.
    TruncatedNormal,
}

/// Reusable sampling state for one model: the all-pairs minimal network of
/// its constraint system.
pub struct TraceSampler {
    n: usize,
    /// dist[i * (n+1) + j] = max(t_j - t_i); node 0 is the origin.
    dist: Vec<f64>,
    topo: Vec<usize>,
    topo_rank: Vec<usize>,
    cap_span: f64,
    pub distribution: DelayDistribution,
}

impl TraceSampler {
    pub fn new(tpo: &Tpo) -> Result<Self, GenError> {
        let sys = tpo
            .to_constraints()
            .map_err(|e| GenError::NotSampleable(e.to_string()))?;
        Self::for_system(&sys)
    }

    /// Sampler over an explicit constraint system (used for ground-truth
    /// models given as constraints).
    pub fn for_system(sys: &DifferenceConstraintSystem) -> Result<Self, GenError> {
        let order = sys.order();
        let n = order.len();
        let dim = n + 1;
        let mut dist = vec![f64::INFINITY; dim * dim];
        let mut max_constant = 1.0f64;
        {
            let mut relax = |i: usize, j: usize, w: f64| {
                let v = &mut dist[i * dim + j];
                if w < *v {
                    *v = w;
                }
            };
            for i in 0..dim {
                relax(i, i, 0.0);
            }
            for b in sys.bounds() {
                if b.relation == Relation::Le && b.constant.is_infinite() {
                    continue;
                }
                max_constant = max_constant.max(b.constant.abs());
                let s = match b.source {
                    TimePoint::Origin => 0,
                    TimePoint::Event(ev) => ev.0 + 1,
                };
                let t = b.target.0 + 1;
                match b.relation {
                    Relation::Le => relax(s, t, b.constant),
                    Relation::Ge => relax(t, s, -b.constant),
                }
            }
            for (a, b) in order.covering_edges() {
                relax(b.0 + 1, a.0 + 1, 0.0);
            }
            for e in 0..n {
                relax(e + 1, 0, 0.0);
            }
        }
        for k in 0..dim {
            for i in 0..dim {
                let ik = dist[i * dim + k];
                if ik.is_infinite() {
                    continue;
                }
                for j in 0..dim {
                    let through = ik + dist[k * dim + j];
                    if through < dist[i * dim + j] {
                        dist[i * dim + j] = through;
                    }
                }
            }
        }
        for i in 0..dim {
            if dist[i * dim + i] < -1e-9 {
                return Err(GenError::NotSampleable(
                    "constraint system is infeasible".into(),
                ));
            }
        }
        let topo: Vec<usize> = order.topological().map(|e| e.0).collect();
        let topo_rank = order.topological_ranks();
        Ok(TraceSampler {
            n,
            dist,
            topo,
            topo_rank,
            cap_span: 2.0 * max_constant,
            distribution: DelayDistribution::default(),
        })
    }

    #[inline]
    fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * (self.n + 1) + j]
    }

    /// Draws one conforming trace. Identical seeds give identical traces.
    pub fn sample(&self, seed: u64) -> Result<TimedTrace, GenError> {
        const RETRIES: usize = 8;
        for attempt in 0..RETRIES {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((attempt as u64) << 48));
            if let Some(trace) = self.try_sample(&mut rng) {
                return Ok(trace);
            }
        }
        Err(GenError::DeadEnd(RETRIES))
    }

    fn try_sample(&self, rng: &mut ChaCha8Rng) -> Option<TimedTrace> {
        let n = self.n;
        let mut lb: Vec<f64> = (0..n).map(|e| -self.d(e + 1, 0)).collect();
        let mut ub: Vec<f64> = (0..n).map(|e| self.d(0, e + 1)).collect();
        let mut times = vec![0.0f64; n];
        let mut fixed = vec![false; n];
        for &e in &self.topo {
            let lo = lb[e].max(0.0);
            let mut hi = ub[e];
            if hi.is_infinite() {
                hi = lo + self.cap_span;
            }
            if hi < lo - 1e-6 {
                return None;
            }
            let hi = hi.max(lo);
            let v = self.draw(rng, lo, hi);
            times[e] = v;
            fixed[e] = true;
            for j in 0..n {
                if fixed[j] {
                    continue;
                }
                let up = self.d(e + 1, j + 1);
                if up.is_finite() {
                    ub[j] = ub[j].min(v + up);
                }
                let down = self.d(j + 1, e + 1);
                if down.is_finite() {
                    lb[j] = lb[j].max(v - down);
                }
            }
        }
        let mut events: Vec<usize> = (0..n).collect();
        events.sort_by(|&a, &b| {
            times[a]
                .partial_cmp(&times[b])
                .unwrap()
                .then(self.topo_rank[a].cmp(&self.topo_rank[b]))
        });
        let entries: Vec<(EventId, f64)> =
            events.into_iter().map(|e| (EventId(e), times[e])).collect();
        TimedTrace::new(entries).ok()
    }

    fn draw(&self, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return lo;
        }
        match self.distribution {
            DelayDistribution::Uniform => lo + rng.gen::<f64>() * (hi - lo),
            DelayDistribution::TruncatedNormal => {
                let mean = 0.5 * (lo + hi);
                let sd = (hi - lo) / 4.0;
                let normal = rand_distr::Normal::new(mean, sd).expect("sd positive");
                for _ in 0..16 {
                    let v = rng.sample(normal);
                    if (lo..=hi).contains(&v) {
                        return v;
                    }
                }
                mean
            }
        }
    }
}

/// One-shot convenience around [`TraceSampler`].
pub fn sample_trace(tpo: &Tpo, seed: u64) -> Result<TimedTrace, GenError> {
    TraceSampler::new(tpo)?.sample(seed)
}

/// Samples `count` traces with consecutive seeds starting at `seed`.
pub fn sample_traces(tpo: &Tpo, count: usize, seed: u64) -> Result<Vec<TimedTrace>, GenError> {
    let sampler = TraceSampler::new(tpo)?;
    (0..count as u64)
        .map(|k| sampler.sample(seed + k))
        .collect()
}
