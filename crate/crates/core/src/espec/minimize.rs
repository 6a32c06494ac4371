use std::collections::HashMap;

use crate::automaton::Automaton;

/// Minimal automaton with the same generated and marked languages.
///
/// Moore-style partition refinement over the accessible part. Undefined
/// transitions go to an implicit sink that starts in a block of its own, so
/// states whose generated languages differ are never merged and the output
/// keeps a partial transition map. Each block is represented by its first
/// member in the input's state order and keeps that member's name.
pub fn minimize(a: &Automaton) -> Automaton {
    let a = a.accessible();
    if a.is_empty() {
        return a;
    }
    let n = a.num_states();
    let k = a.num_events();
    let sink = n;

    // block ids: sink, then by first appearance
    let mut block: Vec<usize> = (0..=n)
        .map(|q| {
            if q == sink {
                0
            } else if a.is_marked(q) {
                1
            } else {
                2
            }
        })
        .collect();
    let mut count = renumber(&mut block);

    loop {
        let mut sigs: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next = vec![0; n + 1];
        for q in 0..=n {
            let mut sig = Vec::with_capacity(k + 1);
            sig.push(block[q]);
            for e in 0..k {
                let t = if q == sink { sink } else { a.next(q, e).unwrap_or(sink) };
                sig.push(block[t]);
            }
            let fresh = sigs.len();
            next[q] = *sigs.entry(sig).or_insert(fresh);
        }
        let new_count = renumber(&mut next);
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }

    let sink_block = block[sink];
    let mut rep_of_block: HashMap<usize, usize> = HashMap::new();
    let mut reps = Vec::new();
    for (q, &b) in block.iter().enumerate().take(n) {
        rep_of_block.entry(b).or_insert_with(|| {
            reps.push(q);
            reps.len() - 1
        });
    }
    let new_id = |q: usize| rep_of_block[&block[q]];

    let states = reps.iter().map(|&q| a.state_name(q).to_string()).collect();
    let marked = reps.iter().map(|&q| a.is_marked(q)).collect();
    let mut delta = vec![None; reps.len() * k];
    for (i, &q) in reps.iter().enumerate() {
        for e in 0..k {
            if let Some(t) = a.next(q, e) {
                debug_assert_ne!(block[t], sink_block);
                delta[i * k + e] = Some(new_id(t));
            }
        }
    }
    let initial = a.initial().map(new_id);
    Automaton::from_parts(a.name().to_string(), a.alphabet().clone(), states, initial, marked, delta)
}

/// Relabel block ids by first appearance; returns the number of blocks.
fn renumber(block: &mut [usize]) -> usize {
    let mut map = HashMap::new();
    for b in block.iter_mut() {
        let fresh = map.len();
        *b = *map.entry(*b).or_insert(fresh);
    }
    map.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dup_tail() -> Automaton {
        // q1 -a-> q2 -b-> q1, q1 -c-> q3 -b-> q1 : q2 and q3 are equivalent
        Automaton::builder("x")
            .event("a", true)
            .event("b", true)
            .event("c", true)
            .state("q1")
            .state("q2")
            .state("q3")
            .state("unreached")
            .initial("q1")
            .marked("q1")
            .marked("q2")
            .marked("q3")
            .transition("q1", "a", "q2")
            .transition("q2", "b", "q1")
            .transition("q1", "c", "q3")
            .transition("q3", "b", "q1")
            .build()
            .unwrap()
    }

    #[test]
    fn merges_equivalent_tails() {
        let m = minimize(&dup_tail());
        assert_eq!(m.states(), ["q1", "q2"]);
        assert_eq!(m.step("q1", "c").unwrap(), Some("q2"));
        assert_eq!(minimize(&m), m);
    }

    #[test]
    fn does_not_merge_dead_end_with_sink() {
        // unmarked dead end differs from "undefined": the generated language must survive
        let a = Automaton::builder("x")
            .event("a", true)
            .event("b", true)
            .state("q1")
            .state("q2")
            .state("q3")
            .initial("q1")
            .marked("q1")
            .transition("q1", "a", "q2")
            .transition("q1", "b", "q3")
            .build()
            .unwrap();
        let m = minimize(&a);
        assert_eq!(m.num_states(), 2);
        assert!(m.membership(&["a"]).unwrap().in_generated);
        assert!(m.membership(&["b"]).unwrap().in_generated);
    }

    #[test]
    fn marking_separates() {
        let a = Automaton::builder("x")
            .event("a", true)
            .state("q1")
            .state("q2")
            .initial("q1")
            .marked("q1")
            .transition("q1", "a", "q2")
            .transition("q2", "a", "q1")
            .build()
            .unwrap();
        assert_eq!(minimize(&a).num_states(), 2);
    }
}
