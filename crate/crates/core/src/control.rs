//! Controllability, nonconflict and supremal controllable synthesis for
//! supervisors acting on sub-alphabets of a plant.
//!
//! A supervisor only constrains the events it declares. Every other plant
//! event is permanently enabled as far as that supervisor is concerned, and a
//! set of supervisors acts conjunctively: an event is enabled only when every
//! supervisor declaring it enables it. Controllability flags always come from
//! the plant alphabet.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::automaton::{trace_back, Automaton, StateId};
use crate::compose::{free_delimiter, product, ComposeError};
use crate::event::EventId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ControlError {
    #[error("supervisor {supervisor} declares {event}, which the plant does not have")]
    AlphabetViolation { supervisor: String, event: EventId },
    #[error(transparent)]
    Compose(#[from] ComposeError),
}

/// Ordered supervisors acting jointly on one plant.
#[derive(Debug, Clone, Default)]
pub struct SupervisorSet {
    supervisors: Vec<Automaton>,
}

impl SupervisorSet {
    pub fn new(supervisors: Vec<Automaton>) -> Self {
        SupervisorSet { supervisors }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn push(&mut self, sup: Automaton) {
        self.supervisors.push(sup);
    }

    pub fn len(&self) -> usize {
        self.supervisors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supervisors.is_empty()
    }

    pub fn as_slice(&self) -> &[Automaton] {
        &self.supervisors
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Automaton> {
        self.supervisors.iter()
    }
}

impl FromIterator<Automaton> for SupervisorSet {
    fn from_iter<I: IntoIterator<Item = Automaton>>(iter: I) -> Self {
        SupervisorSet::new(iter.into_iter().collect())
    }
}

pub(crate) fn check_alphabet(plant: &Automaton, sup: &Automaton) -> Result<(), ControlError> {
    match sup.alphabet().events().iter().find(|e| !plant.alphabet().contains(e.as_str())) {
        Some(e) => Err(ControlError::AlphabetViolation { supervisor: sup.name().to_string(), event: e.clone() }),
        None => Ok(()),
    }
}

/// `plant || S1 || ... || Sk`, with supervisor flags overridden by the plant's.
///
/// Composite names use the first of [`FALLBACK_DELIMITERS`](crate::compose::FALLBACK_DELIMITERS)
/// absent from every operand's state names, so a composed plant keeps its own `|`.
pub fn closed_loop(plant: &Automaton, sups: &SupervisorSet) -> Result<Automaton, ControlError> {
    if sups.is_empty() {
        return Ok(plant.accessible());
    }
    let relabeled = relabel_all(plant, sups)?;
    let mut ops = vec![plant];
    ops.extend(relabeled.iter());
    Ok(product(&ops, free_delimiter(&ops))?.automaton)
}

fn relabel_all(plant: &Automaton, sups: &SupervisorSet) -> Result<Vec<Automaton>, ControlError> {
    sups.iter()
        .map(|s| {
            check_alphabet(plant, s)?;
            Ok(s.relabeled(plant.alphabet()))
        })
        .collect()
}

/// An uncontrollable event the supervisor disables after `string`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub string: Vec<EventId>,
    pub event: EventId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControllabilityReport {
    pub controllable: bool,
    pub counterexample: Option<Counterexample>,
    pub states_checked: usize,
}

/// Check whether `sup` ever disables an uncontrollable event the plant can execute.
///
/// Explores `plant || sup` breadth first with events in plant declaration
/// order, so the counterexample string is a shortest one and ties go to the
/// earliest declared events.
pub fn check_controllability(plant: &Automaton, sup: &Automaton) -> Result<ControllabilityReport, ControlError> {
    check_alphabet(plant, sup)?;
    let (Some(x0), Some(y0)) = (plant.initial(), sup.initial()) else {
        return Ok(ControllabilityReport { controllable: true, counterexample: None, states_checked: 0 });
    };
    let in_sup: Vec<Option<usize>> =
        plant.alphabet().events().iter().map(|e| sup.alphabet().index_of(e.as_str())).collect();

    type Pair = (StateId, StateId);
    let mut parent: HashMap<Pair, Option<(Pair, usize)>> = HashMap::from([((x0, y0), None)]);
    let mut queue = VecDeque::from([(x0, y0)]);
    let mut checked = 0;
    while let Some((p, s)) = queue.pop_front() {
        checked += 1;
        for (e, local) in in_sup.iter().enumerate() {
            let Some(p2) = plant.next(p, e) else { continue };
            let s2 = match *local {
                None => Some(s),
                Some(l) => sup.next(s, l),
            };
            match s2 {
                None if !plant.alphabet().is_controllable(e) => {
                    let string = trace_back(&parent, (p, s), |e| plant.alphabet().event(e).clone());
                    let event = plant.alphabet().event(e).clone();
                    return Ok(ControllabilityReport {
                        controllable: false,
                        counterexample: Some(Counterexample { string, event }),
                        states_checked: checked,
                    });
                }
                None => {}
                Some(s2) => {
                    if let Entry::Vacant(v) = parent.entry((p2, s2)) {
                        v.insert(Some(((p, s), e)));
                        queue.push_back((p2, s2));
                    }
                }
            }
        }
    }
    Ok(ControllabilityReport { controllable: true, counterexample: None, states_checked: checked })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonconflictReport {
    pub nonblocking: bool,
    /// Shortest string leading to a state from which no marked state is reachable.
    pub witness: Option<Vec<EventId>>,
    pub states: usize,
    pub blocking_states: usize,
}

/// Is the modular closed loop nonblocking?
pub fn check_nonconflicting(plant: &Automaton, sups: &SupervisorSet) -> Result<NonconflictReport, ControlError> {
    let cl = closed_loop(plant, sups)?;
    let Some(x0) = cl.initial() else {
        return Ok(NonconflictReport { nonblocking: false, witness: Some(Vec::new()), states: 0, blocking_states: 0 });
    };
    let co = cl.coaccessible_states();
    let blocking_states = co.iter().filter(|c| !**c).count();
    let mut parent: HashMap<StateId, Option<(StateId, usize)>> = HashMap::from([(x0, None)]);
    let mut queue = VecDeque::from([x0]);
    while let Some(q) = queue.pop_front() {
        if !co[q] {
            let witness = trace_back(&parent, q, |e| cl.alphabet().event(e).clone());
            return Ok(NonconflictReport {
                nonblocking: false,
                witness: Some(witness),
                states: cl.num_states(),
                blocking_states,
            });
        }
        for e in cl.active_ids(q).collect::<Vec<_>>() {
            let t = cl.next(q, e).expect("active");
            if let Entry::Vacant(v) = parent.entry(t) {
                v.insert(Some((q, e)));
                queue.push_back(t);
            }
        }
    }
    Ok(NonconflictReport { nonblocking: true, witness: None, states: cl.num_states(), blocking_states })
}

/// Supremal controllable sublanguage of `plant || spec`, as a trim automaton.
///
/// Starting from the product, repeatedly deletes states where an
/// uncontrollable plant event is disabled (or leads to a deleted state) and
/// then everything that is no longer reachable or coreachable, until nothing
/// changes. Returns the canonical empty automaton when the initial state goes.
pub fn supcon(plant: &Automaton, spec: &Automaton) -> Result<Automaton, ControlError> {
    check_alphabet(plant, spec)?;
    let spec = spec.relabeled(plant.alphabet());
    let ops = [plant, &spec];
    let prod = product(&ops, free_delimiter(&ops))?;
    let g = &prod.automaton;
    let name = format!("supcon({},{})", plant.name(), spec.name());
    if g.is_empty() {
        return Ok(g.clone().with_name(name));
    }
    // spec ⊆ plant, so the product alphabet is the plant alphabet in plant order
    debug_assert_eq!(g.alphabet(), plant.alphabet());
    let uncontrollable: Vec<usize> =
        (0..plant.num_events()).filter(|&e| !plant.alphabet().is_controllable(e)).collect();

    let n = g.num_states();
    let mut alive = vec![true; n];
    loop {
        let mut changed = false;
        for x in 0..n {
            if !alive[x] {
                continue;
            }
            let p = prod.components[x][0];
            let bad =
                uncontrollable.iter().any(|&e| plant.next(p, e).is_some() && !g.next(x, e).is_some_and(|t| alive[t]));
            if bad {
                alive[x] = false;
                changed = true;
            }
        }
        let trimmed = trim_mask(g, &alive);
        if trimmed != alive {
            alive = trimmed;
            changed = true;
        }
        if !changed {
            break;
        }
    }
    Ok(g.restrict(&alive).with_name(name))
}

/// States that are alive, reachable through alive states and coreachable through alive states.
fn trim_mask(g: &Automaton, alive: &[bool]) -> Vec<bool> {
    let n = g.num_states();
    let mut acc = vec![false; n];
    if let Some(x0) = g.initial().filter(|&x| alive[x]) {
        acc[x0] = true;
        let mut queue = VecDeque::from([x0]);
        while let Some(q) = queue.pop_front() {
            for e in g.active_ids(q).collect::<Vec<_>>() {
                let t = g.next(q, e).expect("active");
                if alive[t] && !acc[t] {
                    acc[t] = true;
                    queue.push_back(t);
                }
            }
        }
    }
    let mut pred = vec![Vec::new(); n];
    for (from, _, to) in g.transitions() {
        if acc[from] && acc[to] {
            pred[to].push(from);
        }
    }
    let mut co = vec![false; n];
    let mut stack: Vec<StateId> = (0..n).filter(|&q| acc[q] && g.is_marked(q)).collect();
    for &q in &stack {
        co[q] = true;
    }
    while let Some(q) = stack.pop() {
        for &p in &pred[q] {
            if !co[p] {
                co[p] = true;
                stack.push(p);
            }
        }
    }
    co
}
