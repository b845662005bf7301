//! Run semantics: deciding whether timed traces conform to a model.
//!
//! The streaming monitor consumes one (event, time) pair at a time and
//! reports the first violation. Clock valuations are a function of the
//! trace prefix, so no search over runs is needed even for racy models.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::clock::{ClockId, ClockValuation};
use crate::constraints::Relation;
use crate::event::EventId;
use crate::tpo::Tpo;
use crate::trace::TimedTrace;

/// Why a trace is incompatible with the model.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Timestamp went backwards.
    TimeRegression {
        event: EventId,
        time: f64,
        previous: f64,
    },
    /// The event already occurred in this trace.
    DuplicateEvent { event: EventId },
    /// A predecessor of the event has not occurred yet.
    OrderViolation { event: EventId, missing: EventId },
    /// A guard conjunct failed: the clock read `actual` at the event.
    GuardViolation {
        event: EventId,
        clock: ClockId,
        relation: Relation,
        constant: f64,
        actual: f64,
    },
    /// The trace ended without covering the whole alphabet.
    IncompleteRun { missing: Vec<EventId> },
}

impl Violation {
    pub fn event(&self) -> Option<EventId> {
        match self {
            Violation::TimeRegression { event, .. }
            | Violation::DuplicateEvent { event }
            | Violation::OrderViolation { event, .. }
            | Violation::GuardViolation { event, .. } => Some(*event),
            Violation::IncompleteRun { .. } => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TimeRegression {
                event,
                time,
                previous,
            } => write!(
                f,
                "time regression at {event}: {time} after {previous}"
            ),
            Violation::DuplicateEvent { event } => write!(f, "duplicate event {event}"),
            Violation::OrderViolation { event, missing } => {
                write!(f, "order violation at {event}: requires {missing} first")
            }
            Violation::GuardViolation {
                event,
                clock,
                relation,
                constant,
                actual,
            } => write!(
                f,
                "guard violation at {event}: {clock} = {actual}, needs {clock} {relation} {constant}"
            ),
            Violation::IncompleteRun { missing } => {
                write!(f, "incomplete run, missing: ")?;
                for (i, e) in missing.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
        }
    }
}

/// Monitor position after a prefix of a trace: the clock valuation, the
/// time of the last event, and the set of events seen so far.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorState {
    valuation: ClockValuation,
    last_time: f64,
    seen: FixedBitSet,
}

impl MonitorState {
    /// The state before any event: all clocks 0 at time 0.
    pub fn initial(tpo: &Tpo) -> Self {
        MonitorState {
            valuation: ClockValuation::zero(tpo.clocks()),
            last_time: 0.0,
            seen: FixedBitSet::with_capacity(tpo.events()),
        }
    }

    pub fn valuation(&self) -> &ClockValuation {
        &self.valuation
    }

    pub fn last_time(&self) -> f64 {
        self.last_time
    }

    pub fn seen_count(&self) -> usize {
        self.seen.count_ones(..)
    }

    pub fn has_seen(&self, event: EventId) -> bool {
        self.seen.contains(event.0)
    }

    /// One step of the run semantics: let time elapse to `time`, check the
    /// guard, then apply the event's resets. Pure: `self` is unchanged.
    pub fn step(&self, tpo: &Tpo, event: EventId, time: f64) -> Result<MonitorState, Violation> {
        if time < self.last_time || !time.is_finite() || time < 0.0 {
            return Err(Violation::TimeRegression {
                event,
                time,
                previous: self.last_time,
            });
        }
        if self.seen.contains(event.0) {
            return Err(Violation::DuplicateEvent { event });
        }
        if let Some(missing) = tpo
            .order()
            .ancestors(event)
            .ones()
            .find(|&p| !self.seen.contains(p))
        {
            return Err(Violation::OrderViolation {
                event,
                missing: EventId(missing),
            });
        }
        let delta = time - self.last_time;
        let elapsed = self
            .valuation
            .advance(delta)
            .expect("delta checked non-negative");
        for conj in tpo.guard(event).conjuncts() {
            let actual = elapsed.get(conj.clock);
            let holds = match conj.relation {
                Relation::Le => actual <= conj.constant,
                Relation::Ge => actual >= conj.constant,
            };
            if !holds {
                return Err(Violation::GuardViolation {
                    event,
                    clock: conj.clock,
                    relation: conj.relation,
                    constant: conj.constant,
                    actual,
                });
            }
        }
        let valuation = elapsed
            .reset(tpo.resets(event).iter().copied())
            .expect("reset clocks validated at construction");
        let mut seen = self.seen.clone();
        seen.insert(event.0);
        Ok(MonitorState {
            valuation,
            last_time: time,
            seen,
        })
    }

    /// Events of the alphabet not seen yet.
    pub fn missing(&self, tpo: &Tpo) -> Vec<EventId> {
        (0..tpo.events())
            .filter(|&i| !self.seen.contains(i))
            .map(EventId)
            .collect()
    }
}

/// Batch check: folds [`MonitorState::step`] over the trace and requires
/// full alphabet coverage at the end.
pub fn check_trace(tpo: &Tpo, trace: &TimedTrace) -> Result<(), Violation> {
    let mut state = MonitorState::initial(tpo);
    for (event, time) in trace.iter() {
        state = state.step(tpo, event, time)?;
    }
    let missing = state.missing(tpo);
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Violation::IncompleteRun { missing })
    }
}

/// Diagnostic variant: keeps stepping past guard violations (resets still
/// apply) and collects every independent guard failure. Structural
/// violations (time, order, duplicates, coverage) still stop the scan.
pub fn collect_violations(tpo: &Tpo, trace: &TimedTrace) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut state = MonitorState::initial(tpo);
    for (event, time) in trace.iter() {
        match state.step(tpo, event, time) {
            Ok(next) => state = next,
            Err(v @ Violation::GuardViolation { .. }) => {
                out.push(v);
                // Continue as if the guard had passed.
                state = force_step(&state, tpo, event, time);
            }
            Err(v) => {
                out.push(v);
                return out;
            }
        }
    }
    let missing = state.missing(tpo);
    if !missing.is_empty() {
        out.push(Violation::IncompleteRun { missing });
    }
    out
}

fn force_step(state: &MonitorState, tpo: &Tpo, event: EventId, time: f64) -> MonitorState {
    let delta = time - state.last_time;
    let valuation = state
        .valuation
        .advance(delta)
        .expect("delta non-negative")
        .reset(tpo.resets(event).iter().copied())
        .expect("resets validated");
    let mut seen = state.seen.clone();
    seen.insert(event.0);
    MonitorState {
        valuation,
        last_time: time,
        seen,
    }
}
