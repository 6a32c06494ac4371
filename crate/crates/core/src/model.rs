//! JSON model files and structural validation.
//!
//! The on-disk shape is
//! `{"name", "events": [{"id", "controllable"}], "states", "initial", "marked", "transitions": [{"from", "on", "to"}]}`.
//! The canonical empty automaton is written with no states and `"initial": ""`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::Automaton;
use crate::event::{check_event_id, Alphabet, EventId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventEntry {
    pub id: String,
    pub controllable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionEntry {
    pub from: String,
    pub on: String,
    pub to: String,
}

/// Unchecked automaton as it appears in a model file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonFile {
    pub name: String,
    pub events: Vec<EventEntry>,
    pub states: Vec<String>,
    pub initial: String,
    pub marked: Vec<String>,
    pub transitions: Vec<TransitionEntry>,
}

/// Which structural invariant a [`Diagnostic`] reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    InvalidEventId { index: usize, id: String, reason: String },
    DuplicateEvent { index: usize, id: String },
    DuplicateState { index: usize, state: String },
    InitialNotInStates { state: String },
    MarkedNotInStates { index: usize, state: String },
    UnknownTransitionState { index: usize, state: String },
    UnknownTransitionEvent { index: usize, event: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::InvalidEventId { index, id, reason } => {
                write!(f, "events[{index}]: invalid event id {id:?} ({reason})")
            }
            Diagnostic::DuplicateEvent { index, id } => write!(f, "events[{index}]: event {id} declared twice"),
            Diagnostic::DuplicateState { index, state } => {
                write!(f, "states[{index}]: state {state:?} declared twice")
            }
            Diagnostic::InitialNotInStates { state } => write!(f, "initial: state {state:?} is not declared"),
            Diagnostic::MarkedNotInStates { index, state } => {
                write!(f, "marked[{index}]: state {state:?} is not declared")
            }
            Diagnostic::UnknownTransitionState { index, state } => {
                write!(f, "transitions[{index}]: unknown state {state:?}")
            }
            Diagnostic::UnknownTransitionEvent { index, event } => {
                write!(f, "transitions[{index}]: event {event:?} is not in the alphabet")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{}malformed model: {source}", path_prefix(.path))]
    Json {
        path: Option<PathBuf>,
        #[source]
        source: serde_json::Error,
    },
    #[error("cannot read {path}: {source}", path = .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("transitions[{index}]: duplicate transition from {from:?} on {on}")]
    DuplicateTransition { index: usize, from: String, on: String },
    #[error("invalid model: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

fn path_prefix(path: &Option<PathBuf>) -> String {
    path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default()
}

/// Check every automaton invariant on an unchecked model.
///
/// Duplicate `(from, on)` rows are not reported here; they are rejected when
/// loading since the transition map could not be functional.
pub fn validate(file: &AutomatonFile) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut events = HashSet::new();
    for (index, e) in file.events.iter().enumerate() {
        if let Err(reason) = check_event_id(&e.id) {
            out.push(Diagnostic::InvalidEventId { index, id: e.id.clone(), reason: reason.to_string() });
        }
        if !events.insert(e.id.as_str()) {
            out.push(Diagnostic::DuplicateEvent { index, id: e.id.clone() });
        }
    }

    let mut states = HashSet::new();
    for (index, s) in file.states.iter().enumerate() {
        if !states.insert(s.as_str()) {
            out.push(Diagnostic::DuplicateState { index, state: s.clone() });
        }
    }

    // canonical empty automaton
    let empty = file.states.is_empty() && file.initial.is_empty();
    if !empty && !states.contains(file.initial.as_str()) {
        out.push(Diagnostic::InitialNotInStates { state: file.initial.clone() });
    }
    for (index, m) in file.marked.iter().enumerate() {
        if !states.contains(m.as_str()) {
            out.push(Diagnostic::MarkedNotInStates { index, state: m.clone() });
        }
    }
    for (index, t) in file.transitions.iter().enumerate() {
        for s in [&t.from, &t.to] {
            if !states.contains(s.as_str()) {
                out.push(Diagnostic::UnknownTransitionState { index, state: s.clone() });
            }
        }
        if !events.contains(t.on.as_str()) {
            out.push(Diagnostic::UnknownTransitionEvent { index, event: t.on.clone() });
        }
    }
    out
}

/// First duplicate `(from, on)` row, if any.
pub fn find_duplicate_transition(file: &AutomatonFile) -> Option<(usize, &TransitionEntry)> {
    let mut seen = HashSet::new();
    file.transitions.iter().enumerate().find(|(_, t)| !seen.insert((t.from.as_str(), t.on.as_str())))
}

impl TryFrom<&AutomatonFile> for Automaton {
    type Error = ModelError;

    fn try_from(file: &AutomatonFile) -> Result<Self, Self::Error> {
        if let Some((index, t)) = find_duplicate_transition(file) {
            return Err(ModelError::DuplicateTransition { index, from: t.from.clone(), on: t.on.clone() });
        }
        let diagnostics = validate(file);
        if !diagnostics.is_empty() {
            return Err(ModelError::Invalid(diagnostics));
        }

        let mut alphabet = Alphabet::new();
        for e in &file.events {
            let id = EventId::new(e.id.clone()).expect("validated");
            alphabet.insert(id, e.controllable).expect("validated");
        }
        let index: HashMap<&str, usize> = file.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut marked = vec![false; file.states.len()];
        for m in &file.marked {
            marked[index[m.as_str()]] = true;
        }
        let initial = index.get(file.initial.as_str()).copied();
        let mut delta = vec![None; file.states.len() * alphabet.len()];
        for t in &file.transitions {
            let e = alphabet.index_of(&t.on).expect("validated");
            delta[index[t.from.as_str()] * alphabet.len() + e] = Some(index[t.to.as_str()]);
        }
        Ok(Automaton::from_parts(file.name.clone(), alphabet, file.states.clone(), initial, marked, delta))
    }
}

impl From<&Automaton> for AutomatonFile {
    fn from(a: &Automaton) -> Self {
        let events = a.alphabet().iter().map(|(e, c)| EventEntry { id: e.to_string(), controllable: c }).collect();
        let transitions = a
            .transitions()
            .map(|(from, e, to)| TransitionEntry {
                from: a.state_name(from).to_string(),
                on: a.alphabet().event(e).to_string(),
                to: a.state_name(to).to_string(),
            })
            .collect();
        AutomatonFile {
            name: a.name().to_string(),
            events,
            states: a.states().to_vec(),
            initial: a.initial().map(|q| a.state_name(q).to_string()).unwrap_or_default(),
            marked: a.marked_states().map(|q| a.state_name(q).to_string()).collect(),
            transitions,
        }
    }
}

pub fn parse_model(text: &str) -> Result<AutomatonFile, ModelError> {
    serde_json::from_str(text).map_err(|source| ModelError::Json { path: None, source })
}

pub fn read_model(path: &Path) -> Result<AutomatonFile, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| ModelError::Json { path: Some(path.to_path_buf()), source })
}

impl Automaton {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Automaton::try_from(&parse_model(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        Automaton::try_from(&read_model(path)?)
    }

    /// Pretty-printed model file, newline terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&AutomatonFile::from(self)).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        std::fs::write(path, self.to_json()).map_err(|source| ModelError::Io { path: path.to_path_buf(), source })
    }

    /// Diagnostics for this automaton; always empty for values built through the checked constructors.
    pub fn validate(&self) -> Vec<Diagnostic> {
        validate(&AutomatonFile::from(self))
    }
}
