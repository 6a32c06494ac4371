use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::automaton::{trace_back, Automaton, StateId};
use crate::event::EventId;

/// Result of [`equivalent`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    /// Shortest string on which the generated or marked languages disagree.
    pub witness: Option<Vec<EventId>>,
}

/// Compare generated and marked languages.
///
/// Breadth-first search over pairs of (possibly undefined) states; events are
/// tried in `a`'s declaration order followed by the events only `b` declares.
pub fn equivalent(a: &Automaton, b: &Automaton) -> Equivalence {
    let mut events: Vec<EventId> = a.alphabet().events().to_vec();
    events.extend(b.alphabet().events().iter().filter(|e| !a.alphabet().contains(e.as_str())).cloned());
    let in_a: Vec<Option<usize>> = events.iter().map(|e| a.alphabet().index_of(e.as_str())).collect();
    let in_b: Vec<Option<usize>> = events.iter().map(|e| b.alphabet().index_of(e.as_str())).collect();

    type Pair = (Option<StateId>, Option<StateId>);
    let start: Pair = (a.initial(), b.initial());
    let mut parent: HashMap<Pair, Option<(Pair, usize)>> = HashMap::from([(start, None)]);
    let mut queue = VecDeque::from([start]);
    while let Some(pair @ (p, q)) = queue.pop_front() {
        let differs = match (p, q) {
            (None, None) => false,
            (Some(p), Some(q)) => a.is_marked(p) != b.is_marked(q),
            _ => true,
        };
        if differs {
            let witness = trace_back(&parent, pair, |e| events[e].clone());
            return Equivalence { equivalent: false, witness: Some(witness) };
        }
        if p.is_none() {
            continue;
        }
        for e in 0..events.len() {
            let p2 = p.zip(in_a[e]).and_then(|(p, e)| a.next(p, e));
            let q2 = q.zip(in_b[e]).and_then(|(q, e)| b.next(q, e));
            if p2.is_none() && q2.is_none() {
                continue;
            }
            if let std::collections::hash_map::Entry::Vacant(v) = parent.entry((p2, q2)) {
                v.insert(Some((pair, e)));
                queue.push_back((p2, q2));
            }
        }
    }
    Equivalence { equivalent: true, witness: None }
}
