//! Synchronous composition and natural projection.

use std::collections::HashMap;

use thiserror::Error;

use crate::automaton::{Automaton, StateId};
use crate::event::{Alphabet, EventId};

pub const DEFAULT_DELIMITER: &str = "|";

/// Delimiters tried, in order, when composing automata whose state names may
/// already be composite (a plant with its supervisors, for instance).
pub const FALLBACK_DELIMITERS: [&str; 6] = ["|", "/", "#", "~", "^", "::"];

/// First delimiter of [`FALLBACK_DELIMITERS`] that no operand state name contains.
pub fn free_delimiter(operands: &[&Automaton]) -> &'static str {
    FALLBACK_DELIMITERS
        .into_iter()
        .find(|d| operands.iter().all(|a| a.states().iter().all(|s| !s.contains(d))))
        .unwrap_or(DEFAULT_DELIMITER)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("nothing to compose")]
    NoOperands,
    #[error("event {event} is controllable in {controllable_in} but uncontrollable in {uncontrollable_in}")]
    ControllabilityMismatch { event: EventId, controllable_in: String, uncontrollable_in: String },
    #[error("state {state:?} of {automaton} contains the delimiter {delimiter:?}")]
    DelimiterInStateName { automaton: String, state: String, delimiter: String },
}

/// Reachable product together with the component state of every product state.
#[derive(Debug, Clone)]
pub struct Product {
    pub automaton: Automaton,
    /// `components[x][i]` is the state of operand `i` in product state `x`.
    pub components: Vec<Vec<StateId>>,
}

/// Union of the operands' alphabets in first-declaration order.
pub fn union_alphabet(operands: &[&Automaton]) -> Result<Alphabet, ComposeError> {
    let mut out = Alphabet::new();
    let mut owner: Vec<usize> = Vec::new();
    for (i, a) in operands.iter().enumerate() {
        for (e, c) in a.alphabet().iter() {
            match out.index_of(e.as_str()) {
                Some(j) if out.is_controllable(j) != c => {
                    let (ci, ui) = if out.is_controllable(j) { (owner[j], i) } else { (i, owner[j]) };
                    return Err(ComposeError::ControllabilityMismatch {
                        event: e.clone(),
                        controllable_in: operands[ci].name().to_string(),
                        uncontrollable_in: operands[ui].name().to_string(),
                    });
                }
                Some(_) => {}
                None => {
                    out.insert(e.clone(), c).expect("fresh event");
                    owner.push(i);
                }
            }
        }
    }
    Ok(out)
}

/// Synchronous product of `operands`, exploring reachable state tuples breadth first.
///
/// An event fires iff every operand declaring it can take it, and then moves
/// exactly those operands. Product states are named by joining component
/// names with `delimiter` in operand order; marked states are the tuples of
/// marked components.
pub fn product(operands: &[&Automaton], delimiter: &str) -> Result<Product, ComposeError> {
    if operands.is_empty() {
        return Err(ComposeError::NoOperands);
    }
    let alphabet = union_alphabet(operands)?;
    if operands.len() > 1 {
        for a in operands {
            if let Some(s) = a.states().iter().find(|s| delimiter.is_empty() || s.contains(delimiter)) {
                return Err(ComposeError::DelimiterInStateName {
                    automaton: a.name().to_string(),
                    state: s.clone(),
                    delimiter: delimiter.to_string(),
                });
            }
        }
    }
    let name = operands.iter().map(|a| a.name()).collect::<Vec<_>>().join("||");

    let initial: Option<Vec<StateId>> = operands.iter().map(|a| a.initial()).collect();
    let Some(initial) = initial else {
        return Ok(Product { automaton: Automaton::empty(name, alphabet), components: Vec::new() });
    };

    // for each product event, the (operand, local event) pairs that declare it
    let participants: Vec<Vec<(usize, usize)>> = alphabet
        .events()
        .iter()
        .map(|e| {
            operands.iter().enumerate().filter_map(|(i, a)| a.alphabet().index_of(e.as_str()).map(|l| (i, l))).collect()
        })
        .collect();

    let k = alphabet.len();
    let mut index: HashMap<Vec<StateId>, StateId> = HashMap::from([(initial.clone(), 0)]);
    let mut tuples = vec![initial];
    let mut delta: Vec<Option<StateId>> = Vec::new();
    let mut x = 0;
    while x < tuples.len() {
        delta.extend(std::iter::repeat_n(None, k));
        for (e, parts) in participants.iter().enumerate() {
            let mut next = tuples[x].clone();
            let fires = parts.iter().all(|&(i, l)| match operands[i].next(tuples[x][i], l) {
                Some(t) => {
                    next[i] = t;
                    true
                }
                None => false,
            });
            if !fires {
                continue;
            }
            let target = match index.get(&next) {
                Some(&y) => y,
                None => {
                    let y = tuples.len();
                    index.insert(next.clone(), y);
                    tuples.push(next);
                    y
                }
            };
            delta[x * k + e] = Some(target);
        }
        x += 1;
    }

    let states = tuples
        .iter()
        .map(|t| t.iter().enumerate().map(|(i, &q)| operands[i].state_name(q)).collect::<Vec<_>>().join(delimiter))
        .collect();
    let marked = tuples.iter().map(|t| t.iter().enumerate().all(|(i, &q)| operands[i].is_marked(q))).collect();
    let automaton = Automaton::from_parts(name, alphabet, states, Some(0), marked, delta);
    Ok(Product { automaton, components: tuples })
}

/// `A1 || A2 || ... || An`. A single operand comes back as its accessible part, unrenamed.
pub fn parallel(operands: &[&Automaton], delimiter: &str) -> Result<Automaton, ComposeError> {
    if let [only] = operands {
        return Ok(only.accessible());
    }
    product(operands, delimiter).map(|p| p.automaton)
}

/// Natural projection: the subsequence of `trace` made of events in `alphabet`.
pub fn project<E: AsRef<str>>(trace: &[E], alphabet: &Alphabet) -> Vec<EventId> {
    trace.iter().filter_map(|e| alphabet.index_of(e.as_ref()).map(|i| alphabet.event(i).clone())).collect()
}
