//! Deterministic finite automata with marked states.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::event::{Alphabet, EventId};
use crate::model::{AutomatonFile, EventEntry, ModelError, TransitionEntry};

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("event {0:?} is not in the alphabet")]
    UnknownEvent(String),
}

/// Outcome of running a string through an automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MembershipVerdict {
    pub in_generated: bool,
    pub in_marked: bool,
    /// Position of the first event that could not be executed.
    pub failure_index: Option<usize>,
}

/// A deterministic automaton `(Q, E, f, x0, Qm)`.
///
/// The transition function is a dense table indexed by `(state, event)`;
/// the active-event set of a state is the set of defined entries in its row.
/// An automaton without states (and therefore without an initial state) is
/// the canonical empty automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    name: String,
    alphabet: Alphabet,
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    initial: Option<StateId>,
    marked: Vec<bool>,
    delta: Vec<Option<StateId>>,
}

impl Automaton {
    pub(crate) fn from_parts(
        name: String,
        alphabet: Alphabet,
        states: Vec<String>,
        initial: Option<StateId>,
        marked: Vec<bool>,
        delta: Vec<Option<StateId>>,
    ) -> Self {
        debug_assert_eq!(marked.len(), states.len());
        debug_assert_eq!(delta.len(), states.len() * alphabet.len());
        debug_assert_eq!(initial.is_none(), states.is_empty());
        let state_index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Automaton { name, alphabet, states, state_index, initial, marked, delta }
    }

    /// The canonical empty automaton over `alphabet`.
    pub fn empty(name: impl Into<String>, alphabet: Alphabet) -> Self {
        Automaton::from_parts(name.into(), alphabet, Vec::new(), None, Vec::new(), Vec::new())
    }

    pub fn builder(name: impl Into<String>) -> AutomatonBuilder {
        AutomatonBuilder::new(name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Same structure with controllability flags taken from `flags` where it declares the event.
    pub fn relabeled(&self, flags: &Alphabet) -> Self {
        let mut out = self.clone();
        out.alphabet = self.alphabet.with_flags_from(flags);
        out
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_events(&self) -> usize {
        self.alphabet.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn initial(&self) -> Option<StateId> {
        self.initial
    }

    pub(crate) fn with_marked(&self, marked: Vec<bool>) -> Automaton {
        assert_eq!(marked.len(), self.states.len());
        Automaton { marked, ..self.clone() }
    }

    pub fn is_marked(&self, q: StateId) -> bool {
        self.marked[q]
    }

    pub fn marked_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.marked.iter().enumerate().filter(|(_, m)| **m).map(|(q, _)| q)
    }

    /// `f(q, e)` by index.
    #[inline]
    pub fn next(&self, q: StateId, e: usize) -> Option<StateId> {
        self.delta[q * self.alphabet.len() + e]
    }

    /// Indices of the events defined at `q`, in declaration order.
    pub fn active_ids(&self, q: StateId) -> impl Iterator<Item = usize> + '_ {
        let n = self.alphabet.len();
        self.delta[q * n..(q + 1) * n].iter().enumerate().filter(|(_, t)| t.is_some()).map(|(e, _)| e)
    }

    /// All transitions `(from, event, to)` ordered by source state then event.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, usize, StateId)> + '_ {
        let n = self.alphabet.len().max(1);
        self.delta.iter().enumerate().filter_map(move |(i, t)| t.map(|to| (i / n, i % n, to)))
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().filter(|t| t.is_some()).count()
    }

    fn query_state(&self, q: &str) -> Result<StateId, QueryError> {
        self.state_id(q).ok_or_else(|| QueryError::UnknownState(q.to_string()))
    }

    fn query_event(&self, e: &str) -> Result<usize, QueryError> {
        self.alphabet.index_of(e).ok_or_else(|| QueryError::UnknownEvent(e.to_string()))
    }

    /// Active-event set `H(q)`.
    pub fn active(&self, q: &str) -> Result<Vec<&EventId>, QueryError> {
        let q = self.query_state(q)?;
        Ok(self.active_ids(q).map(|e| self.alphabet.event(e)).collect())
    }

    /// `f(q, e)`, or `None` where undefined.
    pub fn step(&self, q: &str, e: &str) -> Result<Option<&str>, QueryError> {
        let q = self.query_state(q)?;
        let e = self.query_event(e)?;
        Ok(self.next(q, e).map(|t| self.state_name(t)))
    }

    /// State reached from the initial state by `s`, if `s` is executable.
    pub fn run_ids(&self, s: &[usize]) -> Option<StateId> {
        s.iter().try_fold(self.initial?, |q, &e| self.next(q, e))
    }

    pub fn membership<S: AsRef<str>>(&self, s: &[S]) -> Result<MembershipVerdict, QueryError> {
        let ids = s.iter().map(|e| self.query_event(e.as_ref())).collect::<Result<Vec<_>, _>>()?;
        Ok(self.membership_ids(&ids))
    }

    pub fn membership_ids(&self, s: &[usize]) -> MembershipVerdict {
        let Some(mut q) = self.initial else {
            return MembershipVerdict { in_generated: false, in_marked: false, failure_index: Some(0) };
        };
        for (i, &e) in s.iter().enumerate() {
            match self.next(q, e) {
                Some(t) => q = t,
                None => return MembershipVerdict { in_generated: false, in_marked: false, failure_index: Some(i) },
            }
        }
        MembershipVerdict { in_generated: true, in_marked: self.marked[q], failure_index: None }
    }

    /// Reverse adjacency: for every state, the states with a transition into it.
    fn predecessors(&self) -> Vec<Vec<StateId>> {
        let mut pred = vec![Vec::new(); self.states.len()];
        for (from, _, to) in self.transitions() {
            pred[to].push(from);
        }
        pred
    }

    pub fn accessible_states(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let Some(x0) = self.initial else { return seen };
        seen[x0] = true;
        let mut queue = VecDeque::from([x0]);
        while let Some(q) = queue.pop_front() {
            for e in 0..self.alphabet.len() {
                if let Some(t) = self.next(q, e) {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        seen
    }

    pub fn coaccessible_states(&self) -> Vec<bool> {
        let pred = self.predecessors();
        let mut seen = self.marked.clone();
        let mut stack: Vec<StateId> = self.marked_states().collect();
        while let Some(q) = stack.pop() {
            for &p in &pred[q] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Sub-automaton on the kept states, order preserved. Dropping the
    /// initial state yields the canonical empty automaton.
    pub fn restrict(&self, keep: &[bool]) -> Automaton {
        match self.initial {
            Some(x0) if keep[x0] => {}
            _ => return Automaton::empty(self.name.clone(), self.alphabet.clone()),
        }
        let mut remap = vec![None; self.states.len()];
        let mut states = Vec::new();
        let mut marked = Vec::new();
        for (q, name) in self.states.iter().enumerate() {
            if keep[q] {
                remap[q] = Some(states.len());
                states.push(name.clone());
                marked.push(self.marked[q]);
            }
        }
        let n = self.alphabet.len();
        let mut delta = vec![None; states.len() * n];
        for (q, new_q) in remap.iter().enumerate() {
            let Some(new_q) = new_q else { continue };
            for e in 0..n {
                if let Some(t) = self.next(q, e) {
                    delta[new_q * n + e] = remap[t];
                }
            }
        }
        let initial = self.initial.and_then(|x0| remap[x0]);
        Automaton::from_parts(self.name.clone(), self.alphabet.clone(), states, initial, marked, delta)
    }

    pub fn accessible(&self) -> Automaton {
        self.restrict(&self.accessible_states())
    }

    pub fn coaccessible(&self) -> Automaton {
        self.restrict(&self.coaccessible_states())
    }

    pub fn trim(&self) -> Automaton {
        self.accessible().coaccessible()
    }

    pub fn is_trim(&self) -> bool {
        let acc = self.accessible_states();
        let co = self.coaccessible_states();
        acc.iter().zip(&co).all(|(a, c)| *a && *c)
    }

    /// Every reachable state can still reach a marked state. The empty automaton is not nonblocking.
    pub fn is_nonblocking(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        let acc = self.accessible_states();
        let co = self.coaccessible_states();
        acc.iter().zip(&co).all(|(a, c)| !*a || *c)
    }

    /// Rename states to `{prefix}{n}` in breadth-first order from the initial
    /// state, dropping unreachable ones.
    pub fn canonical(&self, prefix: &str) -> Automaton {
        let Some(x0) = self.initial else { return Automaton::empty(self.name.clone(), self.alphabet.clone()) };
        let n = self.alphabet.len();
        let mut order = vec![x0];
        let mut remap = vec![None; self.states.len()];
        remap[x0] = Some(0);
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            for e in 0..n {
                if let Some(t) = self.next(q, e) {
                    if remap[t].is_none() {
                        remap[t] = Some(order.len());
                        order.push(t);
                    }
                }
            }
            i += 1;
        }
        let states = (0..order.len()).map(|i| format!("{prefix}{i}")).collect();
        let marked = order.iter().map(|&q| self.marked[q]).collect();
        let mut delta = vec![None; order.len() * n];
        for (new_q, &q) in order.iter().enumerate() {
            for e in 0..n {
                delta[new_q * n + e] = self.next(q, e).and_then(|t| remap[t]);
            }
        }
        Automaton::from_parts(self.name.clone(), self.alphabet.clone(), states, Some(0), marked, delta)
    }

    /// Checks `L(self) ⊆ L(other)` on generated languages.
    ///
    /// On failure the witness is a shortest string of `L(self) \ L(other)`,
    /// ties broken by `self`'s event order.
    pub fn is_sublanguage(&self, other: &Automaton) -> Sublanguage {
        let Some(x0) = self.initial else { return Sublanguage { holds: true, witness: None } };
        let Some(y0) = other.initial else { return Sublanguage { holds: false, witness: Some(Vec::new()) } };
        let to_other: Vec<Option<usize>> =
            self.alphabet.events().iter().map(|e| other.alphabet.index_of(e.as_str())).collect();

        type Pair = (StateId, StateId);
        let mut parent: HashMap<Pair, Option<(Pair, usize)>> = HashMap::new();
        parent.insert((x0, y0), None);
        let mut queue = VecDeque::from([(x0, y0)]);
        while let Some((p, q)) = queue.pop_front() {
            for e in self.active_ids(p).collect::<Vec<_>>() {
                let p2 = self.next(p, e).expect("active");
                match to_other[e].and_then(|f| other.next(q, f)) {
                    None => {
                        let mut witness = trace_back(&parent, (p, q), |e| self.alphabet.event(e).clone());
                        witness.push(self.alphabet.event(e).clone());
                        return Sublanguage { holds: false, witness: Some(witness) };
                    }
                    Some(q2) => {
                        if let std::collections::hash_map::Entry::Vacant(v) = parent.entry((p2, q2)) {
                            v.insert(Some(((p, q), e)));
                            queue.push_back((p2, q2));
                        }
                    }
                }
            }
        }
        Sublanguage { holds: true, witness: None }
    }
}

/// Rebuild the event string leading to `node` from BFS parent links.
pub(crate) fn trace_back<K, T>(
    parent: &HashMap<K, Option<(K, usize)>>,
    mut node: K,
    label: impl Fn(usize) -> T,
) -> Vec<T>
where
    K: std::hash::Hash + Eq + Copy,
{
    let mut out = Vec::new();
    while let Some(Some((prev, e))) = parent.get(&node) {
        out.push(label(*e));
        node = *prev;
    }
    out.reverse();
    out
}

/// Result of [`Automaton::is_sublanguage`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sublanguage {
    pub holds: bool,
    pub witness: Option<Vec<EventId>>,
}

/// Incremental construction of an [`Automaton`], checked on [`build`](AutomatonBuilder::build).
#[derive(Debug, Clone)]
pub struct AutomatonBuilder {
    file: AutomatonFile,
}

impl AutomatonBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        AutomatonBuilder {
            file: AutomatonFile {
                name: name.into(),
                events: Vec::new(),
                states: Vec::new(),
                initial: String::new(),
                marked: Vec::new(),
                transitions: Vec::new(),
            },
        }
    }

    pub fn event(mut self, id: impl Into<String>, controllable: bool) -> Self {
        self.file.events.push(EventEntry { id: id.into(), controllable });
        self
    }

    pub fn state(mut self, name: impl Into<String>) -> Self {
        self.file.states.push(name.into());
        self
    }

    pub fn initial(mut self, name: impl Into<String>) -> Self {
        self.file.initial = name.into();
        self
    }

    pub fn marked(mut self, name: impl Into<String>) -> Self {
        self.file.marked.push(name.into());
        self
    }

    pub fn transition(mut self, from: impl Into<String>, on: impl Into<String>, to: impl Into<String>) -> Self {
        self.file.transitions.push(TransitionEntry { from: from.into(), on: on.into(), to: to.into() });
        self
    }

    pub fn build(&self) -> Result<Automaton, ModelError> {
        Automaton::try_from(&self.file)
    }
}
