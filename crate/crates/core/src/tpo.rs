//! Timed partial orders: a DAG of events with clock guards and resets.

use thiserror::Error;

use crate::clock::ClockId;
use crate::constraints::{Bound, ConstraintError, DifferenceConstraintSystem, Relation, TimePoint};
use crate::error::TpoError;
use crate::event::EventId;
use crate::order::PartialOrder;

/// One comparison `clock ⋈ constant` inside a guard.
#[derive(Debug, Clone, PartialEq)]
pub struct GuardConjunct {
    pub clock: ClockId,
    pub relation: Relation,
    pub constant: f64,
}

/// Conjunction of clock comparisons checked when an event fires, before the
/// event's resets are applied. An empty conjunction is trivially true.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Guard {
    conjuncts: Vec<GuardConjunct>,
}

impl Guard {
    pub fn always() -> Self {
        Guard::default()
    }

    pub fn new(conjuncts: Vec<GuardConjunct>) -> Self {
        Guard { conjuncts }
    }

    pub fn conjuncts(&self) -> &[GuardConjunct] {
        &self.conjuncts
    }

    pub fn is_trivial(&self) -> bool {
        self.conjuncts.is_empty()
    }

    pub fn mentions(&self, clock: ClockId) -> bool {
        self.conjuncts.iter().any(|c| c.clock == clock)
    }
}

/// A clock raced by two order-incomparable events, at least one of which
/// resets it. Such a pair makes the clock's value depend on the interleaving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RaceViolation {
    pub clock: ClockId,
    pub first: EventId,
    pub second: EventId,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TranslationError {
    #[error("model is not race-free: clock {} raced by {} and {}", .0.clock, .0.first, .0.second)]
    NotRaceFree(RaceViolation),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

/// A timed partial order: precedence DAG, `clocks` clocks, and per-event
/// guard and reset tables. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Tpo {
    order: PartialOrder,
    clocks: usize,
    guards: Vec<Guard>,
    resets: Vec<Vec<ClockId>>,
}

impl Tpo {
    pub fn new(
        order: PartialOrder,
        clocks: usize,
        guards: Vec<Guard>,
        resets: Vec<Vec<ClockId>>,
    ) -> Result<Self, TpoError> {
        let n = order.len();
        if guards.len() != n {
            return Err(TpoError::WrongTableLength {
                got: guards.len(),
                expected: n,
            });
        }
        if resets.len() != n {
            return Err(TpoError::WrongTableLength {
                got: resets.len(),
                expected: n,
            });
        }
        for (i, guard) in guards.iter().enumerate() {
            for c in guard.conjuncts() {
                if c.clock.0 >= clocks {
                    return Err(TpoError::GuardClockOutOfRange {
                        event: EventId(i),
                        clock: c.clock.0,
                        clocks,
                    });
                }
                if !c.constant.is_finite() || c.constant < 0.0 {
                    return Err(TpoError::BadGuardConstant {
                        event: EventId(i),
                        constant: c.constant,
                    });
                }
            }
        }
        let mut resets = resets;
        for (i, set) in resets.iter_mut().enumerate() {
            set.sort();
            set.dedup();
            for c in set.iter() {
                if c.0 >= clocks {
                    return Err(TpoError::ResetClockOutOfRange {
                        event: EventId(i),
                        clock: c.0,
                        clocks,
                    });
                }
            }
        }
        Ok(Tpo {
            order,
            clocks,
            guards,
            resets,
        })
    }

    /// A model with no clocks and no timing constraints over `order`.
    pub fn untimed(order: PartialOrder) -> Self {
        let n = order.len();
        Tpo {
            order,
            clocks: 0,
            guards: vec![Guard::always(); n],
            resets: vec![Vec::new(); n],
        }
    }

    pub fn order(&self) -> &PartialOrder {
        &self.order
    }

    pub fn events(&self) -> usize {
        self.order.len()
    }

    pub fn clocks(&self) -> usize {
        self.clocks
    }

    pub fn guard(&self, event: EventId) -> &Guard {
        &self.guards[event.0]
    }

    pub fn resets(&self, event: EventId) -> &[ClockId] {
        &self.resets[event.0]
    }

    /// Events dependent on `clock`: guard mentions it or the event resets it.
    pub fn dependents(&self, clock: ClockId) -> impl Iterator<Item = EventId> + '_ {
        self.order
            .events()
            .filter(move |&e| self.guards[e.0].mentions(clock) || self.resets[e.0].contains(&clock))
    }

    /// First race violation in a fixed scan order (by clock, then by the
    /// ascending event pair), or `None` if the model is race-free.
    ///
    /// A pair only races when at least one side resets the clock: two
    /// incomparable guards read the same deterministic value, but a reset
    /// makes the value depend on which event fires first.
    pub fn race_witness(&self) -> Option<RaceViolation> {
        for clock in (0..self.clocks).map(ClockId) {
            let deps: Vec<EventId> = self.dependents(clock).collect();
            for (k, &a) in deps.iter().enumerate() {
                for &b in &deps[k + 1..] {
                    let resets_involved =
                        self.resets[a.0].contains(&clock) || self.resets[b.0].contains(&clock);
                    if resets_involved && !self.order.comparable(a, b) {
                        return Some(RaceViolation {
                            clock,
                            first: a,
                            second: b,
                        });
                    }
                }
            }
        }
        None
    }

    pub fn is_race_free(&self) -> bool {
        self.race_witness().is_none()
    }

    /// Translates a race-free model into the equivalent difference-constraint
    /// system: each guard conjunct `c ⋈ a` at event `e` becomes
    /// `t_e - t_r ⋈ a` where `r` is the last event before `e` that resets
    /// `c`, or the absolute bound `t_e ⋈ a` when no reset precedes `e`.
    /// The order constraints are part of the resulting system's semantics.
    pub fn to_constraints(&self) -> Result<DifferenceConstraintSystem, TranslationError> {
        if let Some(witness) = self.race_witness() {
            return Err(TranslationError::NotRaceFree(witness));
        }
        let mut resetters: Vec<Vec<EventId>> = vec![Vec::new(); self.clocks];
        for e in self.order.events() {
            for &c in self.resets(e).iter() {
                resetters[c.0].push(e);
            }
        }
        let mut bounds = Vec::new();
        for e in self.order.events() {
            for conj in self.guard(e).conjuncts() {
                let before: Vec<EventId> = resetters[conj.clock.0]
                    .iter()
                    .copied()
                    .filter(|&r| self.order.precedes(r, e))
                    .collect();
                let source = if before.is_empty() {
                    TimePoint::Origin
                } else {
                    let maxima = self.order.maximal_elements(&before);
                    // Race-freedom makes resetters of one clock a chain.
                    assert_eq!(
                        maxima.len(),
                        1,
                        "race-free model must have a unique last reset"
                    );
                    TimePoint::Event(maxima[0])
                };
                bounds.push(Bound {
                    source,
                    target: e,
                    relation: conj.relation,
                    constant: conj.constant,
                });
            }
        }
        DifferenceConstraintSystem::new(self.order.clone(), bounds).map_err(Into::into)
    }
}
