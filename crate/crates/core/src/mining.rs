//! Mining a timed partial order from a set of timed traces: order
//! identification, interval extraction, redundancy elimination, synthesis.
//! Also splits interleaved pipeline logs into per-product traces.

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::constraints::{
    Bound, ConstraintError, DifferenceConstraintSystem, Heuristic, TimePoint, ToleranceSpec,
    DEFAULT_TOLERANCE,
};
use crate::event::EventId;
use crate::order::PartialOrder;
use crate::synthesis;
use crate::tpo::Tpo;
use crate::trace::TimedTrace;

/// What to do with mined upper bounds, given that no finite sample can
/// witness an infinite one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InfinityPolicy {
    /// Report the observed maxima as finite upper bounds.
    #[default]
    KeepFinite,
    /// Treat observed maxima as censored: drop every upper bound to +inf.
    DropUpperIfAtDataMax,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningConfig {
    pub heuristic: Heuristic,
    /// Symmetric widening of each mined interval as a fraction of its width
    /// (0 reports the raw envelopes).
    pub inflation: f64,
    pub infinity_policy: InfinityPolicy,
    /// Redundancy slack as a fraction of each pair's mined interval width;
    /// absorbs sampling noise so near-coincident envelope sums reduce.
    pub tolerance: f64,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            heuristic: Heuristic::Nearest,
            inflation: 0.0,
            infinity_policy: InfinityPolicy::KeepFinite,
            tolerance: 0.04,
        }
    }
}

impl MiningConfig {
    pub fn tolerance_spec(&self) -> ToleranceSpec {
        ToleranceSpec {
            absolute: DEFAULT_TOLERANCE,
            width_fraction: self.tolerance,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MiningError {
    #[error("cannot mine from an empty trace set")]
    EmptyTraceSet,
    #[error("trace {trace} has {got} events, expected the alphabet size {expected}")]
    AlphabetMismatch {
        trace: usize,
        got: usize,
        expected: usize,
    },
    #[error("trace {trace} is not a permutation of the alphabet")]
    NotAPermutation { trace: usize },
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplitError {
    #[error("log entries are not sorted by timestamp")]
    Unsorted,
    #[error("k must be at least 1")]
    BadK,
    #[error("event {event} occurs {count} times, fewer than the {k} requested traces")]
    CountTooSmall {
        event: EventId,
        count: usize,
        k: usize,
    },
}

/// Result of the full mining pipeline.
#[derive(Debug, Clone)]
pub struct MiningOutcome {
    pub tpo: Tpo,
    /// Raw envelope bounds straight from the data.
    pub raw: DifferenceConstraintSystem,
    /// The surviving irredundant system the model was assembled from.
    pub reduced: DifferenceConstraintSystem,
    pub removed: usize,
    pub trivial: usize,
}

/// Per-event occurrence counts of a pipeline log split: `k * x + y = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventCountVector {
    /// x: occurrences per split trace (positive).
    pub per_trace: Vec<usize>,
    /// y: remainder occurrences that do not fill a trace.
    pub leftover: Vec<usize>,
    /// b: total occurrences in the log.
    pub totals: Vec<usize>,
    /// k: number of concurrent products.
    pub products: usize,
}

#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub counts: EventCountVector,
    /// The k recovered traces, each in original timestamp order.
    pub traces: Vec<Vec<(EventId, f64)>>,
    /// Trailing occurrences beyond `k * x`, in timestamp order.
    pub remainder: Vec<(EventId, f64)>,
}

/// Validates that every trace is a permutation of `0..n` (n from the first
/// trace) and returns per-trace positions and times indexed by event.
fn validate_traces(traces: &[TimedTrace]) -> Result<(usize, Vec<Vec<f64>>), MiningError> {
    if traces.is_empty() {
        return Err(MiningError::EmptyTraceSet);
    }
    let n = traces[0].len();
    let mut times = Vec::with_capacity(traces.len());
    for (k, trace) in traces.iter().enumerate() {
        if trace.len() != n {
            return Err(MiningError::AlphabetMismatch {
                trace: k,
                got: trace.len(),
                expected: n,
            });
        }
        match trace.times_by_event(n) {
            Some(t) => times.push(t),
            None => return Err(MiningError::NotAPermutation { trace: k }),
        }
    }
    Ok((n, times))
}

/// `e_i ≺ e_j` iff `e_i` comes before `e_j` in every trace (sequence order,
/// so coarse-clock ties are broken by log position). The intersection of
/// total orders is transitive by construction.
pub fn identify_partial_order(traces: &[TimedTrace]) -> Result<PartialOrder, MiningError> {
    if traces.is_empty() {
        return Err(MiningError::EmptyTraceSet);
    }
    let n = traces[0].len();
    let mut rows = vec![full_row(n); n];
    for (i, row) in rows.iter_mut().enumerate() {
        row.remove(i);
    }
    for (k, trace) in traces.iter().enumerate() {
        if trace.len() != n {
            return Err(MiningError::AlphabetMismatch {
                trace: k,
                got: trace.len(),
                expected: n,
            });
        }
        // after[e] = events later than e in this trace. Traces are
        // duplicate-free by construction, so ids in range make this a
        // permutation check.
        let mut suffix = FixedBitSet::with_capacity(n);
        let mut after = vec![FixedBitSet::with_capacity(n); n];
        for &(e, _) in trace.entries().iter().rev() {
            if e.0 >= n {
                return Err(MiningError::NotAPermutation { trace: k });
            }
            after[e.0] = suffix.clone();
            suffix.insert(e.0);
        }
        for i in 0..n {
            rows[i].intersect_with(&after[i]);
        }
    }
    PartialOrder::from_relation(n, rows).map_err(|_| MiningError::NotAPermutation { trace: 0 })
}

fn full_row(n: usize) -> FixedBitSet {
    let mut row = FixedBitSet::with_capacity(n);
    row.insert_range(..);
    row
}

/// Envelope bounds: per-event absolute intervals and per-ordered-pair
/// difference intervals, optionally inflated or upper-censored.
pub fn extract_bounds(
    traces: &[TimedTrace],
    order: &PartialOrder,
    config: &MiningConfig,
) -> Result<DifferenceConstraintSystem, MiningError> {
    let (n, times) = validate_traces(traces)?;
    debug_assert_eq!(n, order.len());

    let mut absolute = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
    for t in &times {
        for e in 0..n {
            absolute[e].0 = absolute[e].0.min(t[e]);
            absolute[e].1 = absolute[e].1.max(t[e]);
        }
    }

    let pairs: Vec<(usize, usize)> = order.pairs().map(|(a, b)| (a.0, b.0)).collect();
    let mut diffs = vec![(f64::INFINITY, f64::NEG_INFINITY); pairs.len()];
    for t in &times {
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let d = t[j] - t[i];
            diffs[k].0 = diffs[k].0.min(d);
            diffs[k].1 = diffs[k].1.max(d);
        }
    }

    let censor = config.infinity_policy == InfinityPolicy::DropUpperIfAtDataMax;
    // The monitor reads clock values as chains of exact additions, which
    // round differently from the one-shot subtraction here; nudging the
    // envelope outward at machine precision keeps the training data inside.
    let ulp_pad = |v: f64| v.abs() * 1e-12 + 1e-12;
    let widen = |lo: f64, hi: f64| -> (f64, f64) {
        let hi = if censor {
            f64::INFINITY
        } else {
            hi + ulp_pad(hi)
        };
        let lo = lo - ulp_pad(lo);
        if config.inflation > 0.0 && hi.is_finite() {
            let pad = config.inflation * (hi - lo);
            ((lo - pad).max(0.0), hi + pad)
        } else {
            (lo.max(0.0), hi)
        }
    };

    let mut bounds = Vec::with_capacity(2 * (n + pairs.len()));
    for (e, &(raw_lo, raw_hi)) in absolute.iter().enumerate() {
        let (lo, hi) = widen(raw_lo, raw_hi);
        bounds.push(Bound::lower(TimePoint::Origin, EventId(e), lo));
        bounds.push(Bound::upper(TimePoint::Origin, EventId(e), hi));
    }
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let (lo, hi) = widen(diffs[k].0, diffs[k].1);
        bounds.push(Bound::lower(TimePoint::Event(EventId(i)), EventId(j), lo));
        bounds.push(Bound::upper(TimePoint::Event(EventId(i)), EventId(j), hi));
    }

    DifferenceConstraintSystem::new(order.clone(), bounds).map_err(Into::into)
}

/// The full pipeline: identify the order, extract envelopes, eliminate
/// redundancy, and synthesize the model. Every input trace conforms to the
/// result.
pub fn mine(traces: &[TimedTrace], config: &MiningConfig) -> Result<MiningOutcome, MiningError> {
    let order = identify_partial_order(traces)?;
    let raw = extract_bounds(traces, &order, config)?;
    let elimination = raw.eliminate_redundancy(config.heuristic, config.tolerance_spec())?;
    let tpo = synthesis::synthesize(&elimination.system);
    Ok(MiningOutcome {
        tpo,
        raw,
        removed: elimination.removed.len(),
        trivial: elimination.trivial.len(),
        reduced: elimination.system,
    })
}

pub fn mine_tpo(traces: &[TimedTrace], config: &MiningConfig) -> Result<Tpo, MiningError> {
    mine(traces, config).map(|o| o.tpo)
}

/// Splits a timestamp-sorted log of `k` interleaved product runs. The count
/// program `k*x + y = b, 0 < x, 0 <= y < k` is diagonal, so it decomposes:
/// `x_e = b_e div k`, `y_e = b_e mod k`. The first `x_e` occurrences of
/// each event go to trace 0, the next `x_e` to trace 1, and so on; the
/// trailing `y_e` occurrences are reported separately.
pub fn split_log(entries: &[(EventId, f64)], k: usize) -> Result<SplitOutcome, SplitError> {
    if k == 0 {
        return Err(SplitError::BadK);
    }
    if entries.windows(2).any(|w| w[1].1 < w[0].1) {
        return Err(SplitError::Unsorted);
    }
    let n = entries.iter().map(|&(e, _)| e.0 + 1).max().unwrap_or(0);
    let mut totals = vec![0usize; n];
    for &(e, _) in entries {
        totals[e.0] += 1;
    }
    for (e, &b) in totals.iter().enumerate() {
        if b < k {
            return Err(SplitError::CountTooSmall {
                event: EventId(e),
                count: b,
                k,
            });
        }
    }
    let per_trace: Vec<usize> = totals.iter().map(|&b| b / k).collect();
    let leftover: Vec<usize> = totals.iter().map(|&b| b % k).collect();

    let mut traces = vec![Vec::new(); k];
    let mut remainder = Vec::new();
    let mut occurrence = vec![0usize; n];
    for &(e, t) in entries {
        let slot = occurrence[e.0] / per_trace[e.0];
        occurrence[e.0] += 1;
        if slot < k {
            traces[slot].push((e, t));
        } else {
            remainder.push((e, t));
        }
    }

    Ok(SplitOutcome {
        counts: EventCountVector {
            per_trace,
            leftover,
            totals,
            products: k,
        },
        traces,
        remainder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> EventId {
        EventId(i)
    }

    fn trace(entries: &[(usize, f64)]) -> TimedTrace {
        TimedTrace::new(entries.iter().map(|&(i, t)| (e(i), t)).collect()).unwrap()
    }

    #[test]
    fn single_trace_yields_its_total_order() {
        let order = identify_partial_order(&[trace(&[(2, 0.0), (0, 1.0), (1, 2.0)])]).unwrap();
        assert!(order.precedes(e(2), e(0)));
        assert!(order.precedes(e(2), e(1)));
        assert!(order.precedes(e(0), e(1)));
        assert_eq!(order.pairs().count(), 3);
    }

    #[test]
    fn swapped_pair_becomes_incomparable() {
        let t1 = trace(&[(0, 0.0), (1, 1.0), (2, 2.0)]);
        let t2 = trace(&[(1, 0.0), (0, 1.0), (2, 2.0)]);
        let order = identify_partial_order(&[t1, t2]).unwrap();
        assert!(!order.comparable(e(0), e(1)));
        assert!(order.precedes(e(0), e(2)));
        assert!(order.precedes(e(1), e(2)));
    }

    #[test]
    fn empty_and_mismatched_inputs_error() {
        assert_eq!(identify_partial_order(&[]), Err(MiningError::EmptyTraceSet));
        let t1 = trace(&[(0, 0.0), (1, 1.0)]);
        let t2 = trace(&[(0, 0.0)]);
        assert!(matches!(
            identify_partial_order(&[t1, t2]),
            Err(MiningError::AlphabetMismatch { trace: 1, .. })
        ));
    }

    #[test]
    fn envelope_extraction_golden() {
        let t1 = trace(&[(0, 1.0), (1, 3.0)]);
        let t2 = trace(&[(0, 2.0), (1, 5.0)]);
        let order = identify_partial_order(&[t1.clone(), t2.clone()]).unwrap();
        let sys = extract_bounds(&[t1, t2], &order, &MiningConfig::default()).unwrap();
        let expect = [
            (TimePoint::Origin, 0, crate::Relation::Ge, 1.0),
            (TimePoint::Origin, 0, crate::Relation::Le, 2.0),
            (TimePoint::Origin, 1, crate::Relation::Ge, 3.0),
            (TimePoint::Origin, 1, crate::Relation::Le, 5.0),
            (TimePoint::Event(e(0)), 1, crate::Relation::Ge, 2.0),
            (TimePoint::Event(e(0)), 1, crate::Relation::Le, 3.0),
        ];
        assert_eq!(sys.bounds().len(), expect.len());
        for (source, target, relation, constant) in expect {
            assert!(sys.bounds().iter().any(|b| b.source == source
                && b.target == e(target)
                && b.relation == relation
                && (b.constant - constant).abs() < 1e-9));
        }
    }

    #[test]
    fn single_trace_gives_degenerate_intervals() {
        let t = trace(&[(0, 1.5), (1, 4.0)]);
        let order = identify_partial_order(std::slice::from_ref(&t)).unwrap();
        let sys = extract_bounds(&[t], &order, &MiningConfig::default()).unwrap();
        for b in sys.bounds() {
            let twin = sys
                .bounds()
                .iter()
                .find(|o| o.source == b.source && o.target == b.target && o.relation != b.relation);
            let twin = twin.expect("both envelope sides present");
            assert!((twin.constant - b.constant).abs() < 1e-9);
        }
    }

    #[test]
    fn inflation_widens_symmetrically_and_clamps_at_zero() {
        let t1 = trace(&[(0, 1.0), (1, 3.0)]);
        let t2 = trace(&[(0, 2.0), (1, 5.0)]);
        let order = identify_partial_order(&[t1.clone(), t2.clone()]).unwrap();
        let config = MiningConfig {
            inflation: 0.5,
            ..MiningConfig::default()
        };
        let sys = extract_bounds(&[t1, t2], &order, &config).unwrap();
        // Pair (0,1) had [2,3]: width 1, inflated to [1.5, 3.5].
        assert!(sys
            .bounds()
            .iter()
            .any(|b| b.source == TimePoint::Event(e(0))
                && b.relation == crate::Relation::Ge
                && (b.constant - 1.5).abs() < 1e-9));
        assert!(sys
            .bounds()
            .iter()
            .any(|b| b.source == TimePoint::Event(e(0))
                && b.relation == crate::Relation::Le
                && (b.constant - 3.5).abs() < 1e-9));
        // Absolute for event 0 was [1,2]: inflated lower 0.5, not below 0.
        assert!(sys.bounds().iter().any(|b| b.source == TimePoint::Origin
            && b.target == e(0)
            && b.relation == crate::Relation::Ge
            && (b.constant - 0.5).abs() < 1e-9));
    }

    #[test]
    fn censoring_drops_all_uppers() {
        let t1 = trace(&[(0, 1.0), (1, 3.0)]);
        let order = identify_partial_order(std::slice::from_ref(&t1)).unwrap();
        let config = MiningConfig {
            infinity_policy: InfinityPolicy::DropUpperIfAtDataMax,
            ..MiningConfig::default()
        };
        let sys = extract_bounds(&[t1], &order, &config).unwrap();
        assert!(sys
            .bounds()
            .iter()
            .filter(|b| b.relation == crate::Relation::Le)
            .all(|b| b.constant.is_infinite()));
    }

    #[test]
    fn mined_model_accepts_every_training_trace() {
        let traces = vec![
            trace(&[(0, 0.0), (1, 2.0), (2, 5.0)]),
            trace(&[(0, 1.0), (2, 4.0), (1, 6.0)]),
            trace(&[(0, 0.5), (1, 3.0), (2, 3.5)]),
        ];
        for heuristic in [
            Heuristic::Nearest,
            Heuristic::Distant,
            Heuristic::Sound,
            Heuristic::Random { seed: 1 },
            Heuristic::Random { seed: 2 },
        ] {
            let config = MiningConfig {
                heuristic,
                ..MiningConfig::default()
            };
            let out = mine(&traces, &config).unwrap();
            for t in &traces {
                assert_eq!(crate::monitor::check_trace(&out.tpo, t), Ok(()));
            }
        }
    }

    #[test]
    fn single_trace_mines_a_total_order_model() {
        let t = trace(&[(0, 0.0), (1, 2.0), (2, 5.0)]);
        let out = mine(std::slice::from_ref(&t), &MiningConfig::default()).unwrap();
        assert_eq!(out.tpo.order().pairs().count(), 3);
        assert_eq!(crate::monitor::check_trace(&out.tpo, &t), Ok(()));
    }

    #[test]
    fn split_exact_division() {
        let entries: Vec<(EventId, f64)> = (0..12).map(|i| (e(i % 2), i as f64)).collect();
        let out = split_log(&entries, 3).unwrap();
        assert_eq!(out.counts.per_trace, vec![2, 2]);
        assert_eq!(out.counts.leftover, vec![0, 0]);
        assert_eq!(out.traces.len(), 3);
        for t in &out.traces {
            assert_eq!(t.iter().filter(|&&(ev, _)| ev == e(0)).count(), 2);
            assert_eq!(t.iter().filter(|&&(ev, _)| ev == e(1)).count(), 2);
        }
        assert!(out.remainder.is_empty());
    }

    #[test]
    fn split_with_remainder() {
        let mut entries: Vec<(EventId, f64)> = Vec::new();
        for i in 0..7 {
            entries.push((e(0), i as f64));
        }
        for i in 0..6 {
            entries.push((e(1), 10.0 + i as f64));
        }
        let out = split_log(&entries, 3).unwrap();
        assert_eq!(out.counts.per_trace, vec![2, 2]);
        assert_eq!(out.counts.leftover, vec![1, 0]);
        assert_eq!(out.remainder.len(), 1);
        assert_eq!(out.remainder[0].0, e(0));
        // k*x + y = b componentwise.
        for i in 0..2 {
            assert_eq!(
                3 * out.counts.per_trace[i] + out.counts.leftover[i],
                out.counts.totals[i]
            );
        }
    }

    #[test]
    fn split_rejects_starved_events() {
        let entries = vec![(e(0), 0.0), (e(0), 1.0), (e(1), 2.0)];
        assert!(matches!(
            split_log(&entries, 2),
            Err(SplitError::CountTooSmall { event, count: 1, k: 2 }) if event == e(1)
        ));
    }

    #[test]
    fn split_recovers_interleaved_runs() {
        // Three products flowing through a 3-event pipeline in order.
        let mut entries = Vec::new();
        for stage in 0..3usize {
            for product in 0..3usize {
                entries.push((e(stage), (stage * 10 + product * 2) as f64));
            }
        }
        entries.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let out = split_log(&entries, 3).unwrap();
        for (p, t) in out.traces.iter().enumerate() {
            assert_eq!(t.len(), 3);
            for (stage, &(ev, time)) in t.iter().enumerate() {
                assert_eq!(ev, e(stage));
                assert_eq!(time, (stage * 10 + p * 2) as f64);
            }
        }
    }
}
