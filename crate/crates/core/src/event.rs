//! Event identifiers and alphabets with a controllable/uncontrollable partition.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Rejected event identifier.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid event id {id:?}: {reason}")]
pub struct EventIdError {
    pub id: String,
    pub reason: &'static str,
}

/// An event label such as `C1.load` or `R.pick3`.
///
/// Identifiers are nonempty, start with an ASCII letter and contain only
/// letters, digits, `.` and `_`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EventId(String);

impl EventId {
    pub fn new(id: impl Into<String>) -> Result<Self, EventIdError> {
        let id = id.into();
        check_event_id(&id).map(|()| EventId(id.clone())).map_err(|reason| EventIdError { id, reason })
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn check_event_id(id: &str) -> Result<(), &'static str> {
    let mut chars = id.chars();
    match chars.next() {
        None => return Err("empty identifier"),
        Some(c) if !c.is_ascii_alphabetic() => return Err("must start with a letter"),
        _ => {}
    }
    if chars.all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '_') {
        Ok(())
    } else {
        Err("only letters, digits, '.' and '_' are allowed")
    }
}

impl TryFrom<String> for EventId {
    type Error = EventIdError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        EventId::new(value)
    }
}

impl From<EventId> for String {
    fn from(value: EventId) -> Self {
        value.0
    }
}

impl AsRef<str> for EventId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("event {0} declared twice")]
    Duplicate(EventId),
}

/// Ordered set of events, each flagged controllable or not.
///
/// Iteration order is declaration order. The controllable and uncontrollable
/// subsets partition the alphabet by construction.
#[derive(Debug, Clone, Default)]
pub struct Alphabet {
    events: Vec<EventId>,
    controllable: Vec<bool>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries<I>(entries: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = (EventId, bool)>,
    {
        let mut alphabet = Alphabet::new();
        for (id, controllable) in entries {
            alphabet.insert(id, controllable)?;
        }
        Ok(alphabet)
    }

    pub fn insert(&mut self, id: EventId, controllable: bool) -> Result<usize, AlphabetError> {
        if self.index.contains_key(id.as_str()) {
            return Err(AlphabetError::Duplicate(id));
        }
        let idx = self.events.len();
        self.index.insert(id.0.clone(), idx);
        self.events.push(id);
        self.controllable.push(controllable);
        Ok(idx)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index_of(id).is_some()
    }

    pub fn event(&self, idx: usize) -> &EventId {
        &self.events[idx]
    }

    pub fn is_controllable(&self, idx: usize) -> bool {
        self.controllable[idx]
    }

    /// Controllability flag by name, `None` for undeclared events.
    pub fn controllable(&self, id: &str) -> Option<bool> {
        self.index_of(id).map(|i| self.controllable[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EventId, bool)> + '_ {
        self.events.iter().zip(self.controllable.iter().copied())
    }

    pub fn events(&self) -> &[EventId] {
        &self.events
    }

    pub fn controllable_events(&self) -> impl Iterator<Item = &EventId> + '_ {
        self.iter().filter(|(_, c)| *c).map(|(e, _)| e)
    }

    pub fn uncontrollable_events(&self) -> impl Iterator<Item = &EventId> + '_ {
        self.iter().filter(|(_, c)| !*c).map(|(e, _)| e)
    }

    /// Same events, flags overridden from `other` wherever `other` declares the event.
    pub fn with_flags_from(&self, other: &Alphabet) -> Alphabet {
        let mut out = self.clone();
        for (i, e) in self.events.iter().enumerate() {
            if let Some(c) = other.controllable(e.as_str()) {
                out.controllable[i] = c;
            }
        }
        out
    }

    pub fn is_subset_of(&self, other: &Alphabet) -> bool {
        self.events.iter().all(|e| other.contains(e.as_str()))
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.events == other.events && self.controllable == other.controllable
    }
}

impl Eq for Alphabet {}
