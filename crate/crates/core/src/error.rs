//! Error types shared across the crate.

use thiserror::Error;

use crate::event::EventId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("duplicate event label {0:?}")]
    DuplicateLabel(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("negative timestamp {time} for event {event}")]
    NegativeTimestamp { event: EventId, time: f64 },
    #[error("timestamp {time} for event {event} precedes the previous entry at {previous}")]
    DecreasingTimestamp {
        event: EventId,
        time: f64,
        previous: f64,
    },
    #[error("event {0} occurs more than once")]
    DuplicateEvent(EventId),
    #[error("timestamp for event {0} is not finite")]
    NonFiniteTimestamp(EventId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("edge ({0}, {1}) is out of range for {2} events")]
    EdgeOutOfRange(usize, usize, usize),
    #[error("the precedence graph has a cycle through event {0}")]
    Cycle(EventId),
    #[error("relation is not irreflexive at event {0}")]
    Reflexive(EventId),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClockError {
    #[error("cannot advance a valuation by negative delta {0}")]
    NegativeDelta(f64),
    #[error("clock value {0} is negative or not finite")]
    BadValue(f64),
    #[error("clock {clock} out of range: valuation has {len} clocks")]
    ClockOutOfRange { clock: usize, len: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TpoError {
    #[error("guard at event {event} references clock {clock} but the model has {clocks} clocks")]
    GuardClockOutOfRange {
        event: EventId,
        clock: usize,
        clocks: usize,
    },
    #[error("reset at event {event} references clock {clock} but the model has {clocks} clocks")]
    ResetClockOutOfRange {
        event: EventId,
        clock: usize,
        clocks: usize,
    },
    #[error("guard constant {constant} at event {event} is negative or not finite")]
    BadGuardConstant { event: EventId, constant: f64 },
    #[error("event table length {got} does not match alphabet size {expected}")]
    WrongTableLength { got: usize, expected: usize },
}
