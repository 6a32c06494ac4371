use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::minimize::minimize;
use super::parse::Expr;
use crate::automaton::Automaton;
use crate::event::Alphabet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("event {0:?} is not declared in the alphabet")]
    UnknownEvent(String),
}

/// Thompson automaton with epsilon moves. Only used as an intermediate.
#[derive(Default)]
struct Nfa {
    eps: Vec<Vec<usize>>,
    moves: Vec<Vec<(usize, usize)>>,
}

impl Nfa {
    fn add(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.moves.push(Vec::new());
        self.eps.len() - 1
    }

    /// Fragment `(start, accept)` recognizing `expr`.
    fn fragment(&mut self, expr: &Expr, alphabet: &Alphabet) -> Result<(usize, usize), CompileError> {
        Ok(match expr {
            Expr::Epsilon => {
                let s = self.add();
                (s, s)
            }
            Expr::Sym(id) => {
                let e = alphabet.index_of(id).ok_or_else(|| CompileError::UnknownEvent(id.clone()))?;
                let (s, t) = (self.add(), self.add());
                self.moves[s].push((e, t));
                (s, t)
            }
            Expr::Concat(cs) => {
                let (start, mut end) = self.fragment(&cs[0], alphabet)?;
                for c in &cs[1..] {
                    let (s, t) = self.fragment(c, alphabet)?;
                    self.eps[end].push(s);
                    end = t;
                }
                (start, end)
            }
            Expr::Union(cs) => {
                let (start, end) = (self.add(), self.add());
                for c in cs {
                    let (s, t) = self.fragment(c, alphabet)?;
                    self.eps[start].push(s);
                    self.eps[t].push(end);
                }
                (start, end)
            }
            Expr::Star(c) => {
                let (start, end) = (self.add(), self.add());
                let (s, t) = self.fragment(c, alphabet)?;
                self.eps[start].extend([s, end]);
                self.eps[t].extend([s, end]);
                (start, end)
            }
            Expr::PrefClose(c) => {
                let closed = prefix_close(&compile_unnamed(c, alphabet)?);
                self.embed(&closed)
            }
        })
    }

    /// Copy a deterministic automaton in as a fragment accepting its marked language.
    fn embed(&mut self, dfa: &Automaton) -> (usize, usize) {
        let accept = self.add();
        let Some(x0) = dfa.initial() else {
            let start = self.add();
            return (start, accept);
        };
        let base: Vec<usize> = (0..dfa.num_states()).map(|_| self.add()).collect();
        for (from, e, to) in dfa.transitions() {
            self.moves[base[from]].push((e, base[to]));
        }
        for q in dfa.marked_states() {
            self.eps[base[q]].push(accept);
        }
        (base[x0], accept)
    }

    fn closure(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut seen = vec![false; self.eps.len()];
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        let mut out = Vec::new();
        while let Some(q) = stack.pop() {
            if !seen[q] {
                seen[q] = true;
                out.push(q);
                stack.extend(self.eps[q].iter().copied());
            }
        }
        out.sort_unstable();
        out
    }

    /// Subset construction; the empty subset is left undefined rather than made a sink.
    fn determinize(&self, start: usize, accept: usize, alphabet: &Alphabet) -> Automaton {
        let n = alphabet.len();
        let first = self.closure([start]);
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(first.clone(), 0)]);
        let mut subsets = vec![first];
        let mut queue = VecDeque::from([0usize]);
        let mut delta: Vec<Option<usize>> = vec![None; n];
        while let Some(i) = queue.pop_front() {
            for e in 0..n {
                let targets: Vec<usize> = subsets[i]
                    .iter()
                    .flat_map(|&q| self.moves[q].iter().filter(|(ev, _)| *ev == e).map(|(_, t)| *t))
                    .collect();
                if targets.is_empty() {
                    continue;
                }
                let next = self.closure(targets);
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        let j = subsets.len();
                        index.insert(next.clone(), j);
                        subsets.push(next);
                        delta.extend(std::iter::repeat_n(None, n));
                        queue.push_back(j);
                        j
                    }
                };
                delta[i * n + e] = Some(j);
            }
        }
        let states = (0..subsets.len()).map(|i| format!("d{i}")).collect();
        let marked = subsets.iter().map(|s| s.binary_search(&accept).is_ok()).collect();
        Automaton::from_parts("spec".into(), alphabet.clone(), states, Some(0), marked, delta)
    }
}

/// Mark every coaccessible state, then trim: the marked language becomes the
/// set of prefixes of the original one.
pub fn prefix_close(a: &Automaton) -> Automaton {
    a.with_marked(a.coaccessible_states()).trim()
}

fn compile_unnamed(expr: &Expr, alphabet: &Alphabet) -> Result<Automaton, CompileError> {
    let mut nfa = Nfa::default();
    let (start, accept) = nfa.fragment(expr, alphabet)?;
    let dfa = nfa.determinize(start, accept, alphabet).trim();
    Ok(minimize(&dfa))
}

/// Compile an expression to the minimal trim automaton over `alphabet` whose
/// marked language is the expression's language.
///
/// States are named `s0, s1, ...` in breadth-first order. The result keeps a
/// partial transition map; every event of `alphabet` is declared even if the
/// expression never mentions it.
pub fn compile(expr: &Expr, alphabet: &Alphabet) -> Result<Automaton, CompileError> {
    Ok(compile_unnamed(expr, alphabet)?.canonical("s"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::espec::parse;
    use crate::event::EventId;

    fn ab() -> Alphabet {
        Alphabet::from_entries(["a", "b", "c"].map(|e| (EventId::new(e).unwrap(), true))).unwrap()
    }

    #[test]
    fn pair_star_is_two_states() {
        let a = compile(&parse("(a b)*").unwrap(), &ab()).unwrap();
        assert_eq!(a.num_states(), 2);
        assert_eq!(a.num_transitions(), 2);
        assert_eq!(a.marked_states().collect::<Vec<_>>(), [0]);
        assert_eq!(a.alphabet().len(), 3);
        assert!(a.membership(&["a", "b", "a", "b"]).unwrap().in_marked);
        let v = a.membership(&["a"]).unwrap();
        assert!(v.in_generated && !v.in_marked);
    }

    #[test]
    fn prefix_closure_marks_everything() {
        let a = compile(&parse("pc((a b)*)").unwrap(), &ab()).unwrap();
        assert_eq!(a.num_states(), 2);
        assert_eq!(a.marked_states().count(), 2);
    }

    #[test]
    fn unknown_symbol_named() {
        assert_eq!(compile(&parse("a zz").unwrap(), &ab()), Err(CompileError::UnknownEvent("zz".into())));
    }

    #[test]
    fn result_is_trim() {
        let a = compile(&parse("a (b + c)* + c a").unwrap(), &ab()).unwrap();
        assert!(a.is_trim());
        assert!(a.is_nonblocking());
    }

    #[test]
    fn epsilon_language() {
        let a = compile(&parse("()").unwrap(), &ab()).unwrap();
        assert_eq!(a.num_states(), 1);
        assert!(a.membership::<&str>(&[]).unwrap().in_marked);
        assert_eq!(a.num_transitions(), 0);
    }
}
