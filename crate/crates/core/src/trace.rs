//! Timed traces: one observed run of a workflow.

use crate::error::TraceError;
use crate::event::EventId;

/// A sequence of (event, timestamp) pairs with non-decreasing timestamps and
/// no repeated event. Equal timestamps are allowed; the sequence position
/// breaks the tie, matching how coarse-clock logs are recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedTrace {
    entries: Vec<(EventId, f64)>,
}

impl TimedTrace {
    pub fn new(entries: Vec<(EventId, f64)>) -> Result<Self, TraceError> {
        let mut last = 0.0f64;
        let mut seen = std::collections::HashSet::new();
        for &(event, time) in &entries {
            if !time.is_finite() {
                return Err(TraceError::NonFiniteTimestamp(event));
            }
            if time < 0.0 {
                return Err(TraceError::NegativeTimestamp { event, time });
            }
            if time < last {
                return Err(TraceError::DecreasingTimestamp {
                    event,
                    time,
                    previous: last,
                });
            }
            if !seen.insert(event) {
                return Err(TraceError::DuplicateEvent(event));
            }
            last = time;
        }
        Ok(TimedTrace { entries })
    }

    pub fn entries(&self) -> &[(EventId, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EventId, f64)> + '_ {
        self.entries.iter().copied()
    }

    /// Timestamp of `event`, if present.
    pub fn time_of(&self, event: EventId) -> Option<f64> {
        self.entries
            .iter()
            .find(|&&(e, _)| e == event)
            .map(|&(_, t)| t)
    }

    /// Sequence position of each event for an alphabet of size `n`;
    /// `None` where the event does not occur.
    pub fn positions(&self, n: usize) -> Vec<Option<usize>> {
        let mut pos = vec![None; n];
        for (k, &(e, _)) in self.entries.iter().enumerate() {
            if e.0 < n {
                pos[e.0] = Some(k);
            }
        }
        pos
    }

    /// Timestamps indexed by event id, for traces covering `0..n` exactly.
    pub fn times_by_event(&self, n: usize) -> Option<Vec<f64>> {
        if self.entries.len() != n {
            return None;
        }
        let mut times = vec![f64::NAN; n];
        for &(e, t) in &self.entries {
            if e.0 >= n || !times[e.0].is_nan() {
                return None;
            }
            times[e.0] = t;
        }
        Some(times)
    }
}
