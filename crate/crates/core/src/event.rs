//! Event identifiers and label alphabets.

use std::collections::HashMap;
use std::fmt;

use crate::error::AlphabetError;

/// Dense index of an event within an alphabet. Ids are contiguous from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub usize);

impl EventId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Maps event labels to dense ids. Labels are unique; ids are their positions.
///
/// The fictitious initial time point (always at time 0) is not part of any
/// alphabet; it is represented by [`crate::constraints::TimePoint::Origin`].
#[derive(Debug, Clone, Default)]
pub struct Alphabet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for Alphabet {}

impl Alphabet {
    pub fn from_labels<I, S>(labels: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Alphabet::default();
        for label in labels {
            out.push(label.into())?;
        }
        Ok(out)
    }

    fn push(&mut self, label: String) -> Result<EventId, AlphabetError> {
        if self.index.contains_key(&label) {
            return Err(AlphabetError::DuplicateLabel(label));
        }
        let id = self.labels.len();
        self.index.insert(label.clone(), id);
        self.labels.push(label);
        Ok(EventId(id))
    }

    /// Id of an existing label, or inserts it at the next free id.
    pub fn intern(&mut self, label: &str) -> EventId {
        match self.index.get(label) {
            Some(&id) => EventId(id),
            None => self.push(label.to_owned()).expect("label checked absent"),
        }
    }

    pub fn id(&self, label: &str) -> Option<EventId> {
        self.index.get(label).map(|&i| EventId(i))
    }

    pub fn label(&self, event: EventId) -> &str {
        &self.labels[event.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> {
        (0..self.labels.len()).map(EventId)
    }
}
