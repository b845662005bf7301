//! Timed partial orders (TPOs): a workflow model combining a precedence DAG
//! with clock guards and resets, in the style of timed automata.
//!
//! The crate covers the full round trip:
//!
//! - [`tpo`] — the model, race-freedom, and the translation of race-free
//!   models into difference constraints over event times;
//! - [`monitor`] — run semantics: checking timed traces against a model,
//!   streaming or batch;
//! - [`constraints`] — difference-constraint systems, shortest-path
//!   optimization, and redundancy elimination heuristics;
//! - [`synthesis`] — building a race-free model back from an irredundant
//!   constraint system with as few clocks as a greedy coloring allows;
//! - [`mining`] — learning a model from a set of timed traces, plus log
//!   splitting for interleaved pipeline logs;
//! - [`gen`] — seeded random model generation and compatible-trace sampling
//!   for benchmarks.

pub mod clock;
pub mod constraints;
pub mod error;
pub mod event;
pub mod gen;
pub mod mining;
pub mod monitor;
pub mod order;
pub mod samples;
pub mod synthesis;
pub mod tpo;
pub mod trace;

pub use clock::{ClockId, ClockValuation};
pub use constraints::{
    Bound, DifferenceConstraintSystem, Heuristic, Optimum, Relation, Sense, TimePoint,
    ToleranceSpec,
};
pub use event::{Alphabet, EventId};
pub use monitor::{MonitorState, Violation};
pub use order::PartialOrder;
pub use tpo::{Guard, GuardConjunct, Tpo};
pub use trace::TimedTrace;
