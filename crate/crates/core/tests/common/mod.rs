//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use des_core::espec::Expr;
use des_core::Automaton;
use proptest::prelude::*;

/// Event pool for random automata: (id, controllable).
pub const EVENTS: [(&str, bool); 4] = [("a", true), ("b", true), ("u", false), ("v", false)];

/// Raw description of a random automaton, realised by [`RawAutomaton::build`].
#[derive(Debug, Clone)]
pub struct RawAutomaton {
    pub name: String,
    pub events: Vec<(&'static str, bool)>,
    pub n: usize,
    pub marked: Vec<bool>,
    /// transitions[q][e] = target
    pub delta: Vec<Vec<Option<usize>>>,
}

impl RawAutomaton {
    pub fn build(&self) -> Automaton {
        let mut b = Automaton::builder(self.name.clone());
        for &(e, c) in &self.events {
            b = b.event(e, c);
        }
        for q in 0..self.n {
            b = b.state(format!("q{q}"));
            if self.marked[q] {
                b = b.marked(format!("q{q}"));
            }
        }
        b = b.initial("q0");
        for (q, row) in self.delta.iter().enumerate() {
            for (e, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    b = b.transition(format!("q{q}"), self.events[e].0, format!("q{t}"));
                }
            }
        }
        b.build().expect("generated automaton is valid")
    }
}

/// Random automaton with up to `max_states` states over a non-empty subset of `events`.
pub fn raw_automaton(
    name: &'static str,
    events: &'static [(&'static str, bool)],
    max_states: usize,
) -> impl Strategy<Value = RawAutomaton> {
    let k = events.len();
    (1..=max_states, prop::collection::vec(any::<bool>(), k))
        .prop_flat_map(move |(n, keep)| {
            let mut evs: Vec<(&'static str, bool)> =
                events.iter().zip(&keep).filter(|(_, &k)| k).map(|(e, _)| *e).collect();
            if evs.is_empty() {
                evs.push(events[0]);
            }
            let m = evs.len();
            (
                Just(evs),
                Just(n),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(prop::collection::vec(prop::option::weighted(0.6, 0..n), m), n),
            )
        })
        .prop_map(move |(events, n, marked, delta)| RawAutomaton { name: name.to_string(), events, n, marked, delta })
}

pub fn automaton(max_states: usize) -> impl Strategy<Value = Automaton> {
    raw_automaton("A", &EVENTS, max_states).prop_map(|r| r.build())
}

/// All strings over `events` of length at most `max_len`, shortest first.
pub fn strings<'e>(events: &[&'e str], max_len: usize) -> Vec<Vec<&'e str>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<&str>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for &e in events {
                let mut t = s.clone();
                t.push(e);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// (generated, marked) membership by walking the transition table by name.
pub fn walk(a: &Automaton, s: &[&str]) -> (bool, bool) {
    let Some(q0) = a.initial() else { return (false, false) };
    let mut q = a.state_name(q0).to_string();
    for e in s {
        if !a.alphabet().contains(e) {
            return (false, false);
        }
        match a.step(&q, e).unwrap() {
            Some(t) => q = t.to_string(),
            None => return (false, false),
        }
    }
    (true, a.is_marked(a.state_id(&q).unwrap()))
}

pub fn event_names(a: &Automaton) -> Vec<&str> {
    a.alphabet().events().iter().map(|e| e.as_str()).collect()
}

/// Union of the alphabets of `autos`, in order.
pub fn union_events<'a>(autos: &[&'a Automaton]) -> Vec<&'a str> {
    let mut out: Vec<&str> = Vec::new();
    for a in autos {
        for e in a.alphabet().events() {
            if !out.contains(&e.as_str()) {
                out.push(e.as_str());
            }
        }
    }
    out
}

// ---- expression interpreter -------------------------------------------------

/// End positions `j` such that `s[i..j]` is in the language of `x`.
pub fn ends(x: &Expr, s: &[&str], i: usize) -> BTreeSet<usize> {
    match x {
        Expr::Epsilon => BTreeSet::from([i]),
        Expr::Sym(a) => {
            if s.get(i) == Some(&a.as_str()) {
                BTreeSet::from([i + 1])
            } else {
                BTreeSet::new()
            }
        }
        Expr::Union(xs) => xs.iter().flat_map(|c| ends(c, s, i)).collect(),
        Expr::Concat(xs) => {
            let mut cur = BTreeSet::from([i]);
            for c in xs {
                cur = cur.iter().flat_map(|&j| ends(c, s, j)).collect();
            }
            cur
        }
        Expr::Star(c) => star_closure(BTreeSet::from([i]), |j| ends(c, s, j)),
        Expr::PrefClose(c) => prefix_ends(c, s, i),
    }
}

/// End positions `j` such that `s[i..j]` is a prefix of some word of `x`.
/// Every expression denotes a non-empty language, which the concat case relies on.
pub fn prefix_ends(x: &Expr, s: &[&str], i: usize) -> BTreeSet<usize> {
    match x {
        Expr::Epsilon => BTreeSet::from([i]),
        Expr::Sym(_) => {
            let mut out = BTreeSet::from([i]);
            out.extend(ends(x, s, i));
            out
        }
        Expr::Union(xs) => xs.iter().flat_map(|c| prefix_ends(c, s, i)).collect(),
        Expr::Concat(xs) => {
            let mut out = BTreeSet::new();
            let mut cur = BTreeSet::from([i]);
            for c in xs {
                for &j in &cur {
                    out.extend(prefix_ends(c, s, j));
                }
                cur = cur.iter().flat_map(|&j| ends(c, s, j)).collect();
            }
            out.extend(cur);
            out
        }
        Expr::Star(c) => {
            let whole = star_closure(BTreeSet::from([i]), |j| ends(c, s, j));
            whole.iter().flat_map(|&j| prefix_ends(c, s, j)).chain(whole.iter().copied()).collect()
        }
        Expr::PrefClose(c) => prefix_ends(c, s, i),
    }
}

fn star_closure(start: BTreeSet<usize>, step: impl Fn(usize) -> BTreeSet<usize>) -> BTreeSet<usize> {
    let mut all = start.clone();
    let mut frontier: Vec<usize> = start.into_iter().collect();
    while let Some(j) = frontier.pop() {
        for k in step(j) {
            if all.insert(k) {
                frontier.push(k);
            }
        }
    }
    all
}

/// (in prefix closure, in language) of `s` for expression `x`.
pub fn interpret(x: &Expr, s: &[&str]) -> (bool, bool) {
    (prefix_ends(x, s, 0).contains(&s.len()), ends(x, s, 0).contains(&s.len()))
}

pub fn expr(events: &'static [&'static str]) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        1 => Just(Expr::Epsilon),
        6 => prop::sample::select(events).prop_map(Expr::sym),
    ];
    leaf.prop_recursive(4, 24, 4, |inner| {
        prop_oneof![
            3 => prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::concat),
            3 => prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::union),
            2 => inner.clone().prop_map(Expr::star),
            1 => inner.prop_map(Expr::pc),
        ]
    })
}

// ---- pairwise minimality ------------------------------------------------------

/// Table-filling distinguishability over `a` completed with a sink:
/// `dist[p][q]` is true when some string separates states `p` and `q`.
fn distinguishable(a: &Automaton) -> Vec<Vec<bool>> {
    let n = a.num_states();
    let k = a.num_events();
    let sink = n;
    let step = |q: usize, e: usize| if q == sink { sink } else { a.next(q, e).unwrap_or(sink) };
    let marked = |q: usize| q != sink && a.is_marked(q);
    // a real state differs from the sink: the empty string is generated from it
    let mut dist: Vec<Vec<bool>> =
        (0..=n).map(|p| (0..=n).map(|q| marked(p) != marked(q) || ((p == sink) != (q == sink))).collect()).collect();
    loop {
        let mut changed = false;
        for p in 0..=n {
            for q in 0..=n {
                if !dist[p][q] && (0..k).any(|e| dist[step(p, e)][step(q, e)]) {
                    dist[p][q] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return dist;
        }
    }
}

/// A pair of distinct states that no string distinguishes, if any.
pub fn equivalent_pair(a: &Automaton) -> Option<(usize, usize)> {
    let dist = distinguishable(a);
    let n = a.num_states();
    (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).find(|&(p, q)| !dist[p][q])
}

/// Number of language-equivalence classes among the accessible states of `a`:
/// the state count of its minimal automaton.
pub fn class_count(a: &Automaton) -> usize {
    let dist = distinguishable(a);
    let acc = a.accessible_states();
    let mut reps: Vec<usize> = Vec::new();
    for q in (0..a.num_states()).filter(|&q| acc[q]) {
        if reps.iter().all(|&r| dist[r][q]) {
            reps.push(q);
        }
    }
    reps.len()
}

/// Random automaton declaring every event of `events`.
pub fn full_automaton(
    name: &'static str,
    events: &'static [(&'static str, bool)],
    max_states: usize,
) -> impl Strategy<Value = Automaton> {
    (1..=max_states)
        .prop_flat_map(move |n| {
            (
                Just(n),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(prop::collection::vec(prop::option::weighted(0.6, 0..n), events.len()), n),
            )
        })
        .prop_map(move |(n, marked, delta)| {
            RawAutomaton { name: name.to_string(), events: events.to_vec(), n, marked, delta }.build()
        })
}

// ---- composition by projection ------------------------------------------------

/// (generated, marked) membership of `s` in the synchronous product of `autos`,
/// decided by projecting `s` onto each alphabet.
pub fn product_walk(autos: &[&Automaton], s: &[&str]) -> (bool, bool) {
    let mut gen = true;
    let mut marked = true;
    for a in autos {
        let proj: Vec<&str> = s.iter().copied().filter(|e| a.alphabet().contains(e)).collect();
        let (g, m) = walk(a, &proj);
        gen &= g;
        marked &= m;
    }
    (gen, marked)
}

// ---- exhaustive exploration of a modular closed loop --------------------------

/// Configuration of plant and supervisors by state name.
pub type Config = Vec<String>;

pub struct Exploration {
    pub configs: Vec<Config>,
    pub depth: Vec<usize>,
    pub edges: Vec<Vec<usize>>,
    pub marked: Vec<bool>,
    /// false when the depth bound cut exploration short
    pub complete: bool,
}

/// Breadth-first exploration of `plant` under `sups` up to `max_depth` steps,
/// stepping each component by name. An event fires when every component
/// declaring it can take it.
pub fn explore(plant: &Automaton, sups: &[&Automaton], max_depth: usize) -> Exploration {
    use std::collections::HashMap;
    let mut all: Vec<&Automaton> = vec![plant];
    all.extend_from_slice(sups);
    let events = union_events(&all);
    let init: Config = all.iter().map(|a| a.state_name(a.initial().unwrap()).to_string()).collect();
    let mut index: HashMap<Config, usize> = HashMap::from([(init.clone(), 0)]);
    let mut ex = Exploration { configs: vec![init], depth: vec![0], edges: vec![], marked: vec![], complete: true };
    let mut i = 0;
    while i < ex.configs.len() {
        let cfg = ex.configs[i].clone();
        ex.marked.push(all.iter().zip(&cfg).all(|(a, q)| a.is_marked(a.state_id(q).unwrap())));
        let mut out = Vec::new();
        for e in &events {
            let mut next = cfg.clone();
            let fires = all.iter().enumerate().all(|(j, a)| {
                if !a.alphabet().contains(e) {
                    return true;
                }
                match a.step(&cfg[j], e).unwrap() {
                    Some(t) => {
                        next[j] = t.to_string();
                        true
                    }
                    None => false,
                }
            });
            if !fires {
                continue;
            }
            if ex.depth[i] == max_depth {
                if !index.contains_key(&next) {
                    ex.complete = false;
                }
                continue;
            }
            let t = *index.entry(next.clone()).or_insert_with(|| {
                ex.configs.push(next);
                ex.depth.push(ex.depth[i] + 1);
                ex.configs.len() - 1
            });
            out.push(t);
        }
        ex.edges.push(out);
        i += 1;
    }
    ex
}

impl Exploration {
    /// Configurations that can reach a marked one inside the explored graph.
    pub fn coreachable(&self) -> Vec<bool> {
        let n = self.configs.len();
        let mut pred = vec![Vec::new(); n];
        for (p, out) in self.edges.iter().enumerate() {
            for &q in out {
                pred[q].push(p);
            }
        }
        let mut co = self.marked.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&q| co[q]).collect();
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

    pub fn nonblocking(&self) -> bool {
        self.coreachable().iter().all(|&c| c)
    }
}

// ---- controllability by enumeration ----------------------------------------------

/// Every (s, e) with |s| <= `max_len` such that s is in L(plant || sup), e is an
/// uncontrollable event of `sup`'s alphabet (flags from the plant), the plant can
/// do s·e but the supervisor cannot follow.
pub fn violations<'a>(plant: &'a Automaton, sup: &Automaton, max_len: usize) -> Vec<(Vec<&'a str>, &'a str)> {
    let events = event_names(plant);
    let mut out = Vec::new();
    for s in strings(&events, max_len) {
        if !product_walk(&[plant, sup], &s).0 {
            continue;
        }
        for &e in &events {
            if plant.alphabet().controllable(e) != Some(false) || !sup.alphabet().contains(e) {
                continue;
            }
            let mut se = s.clone();
            se.push(e);
            if walk(plant, &se).0 && !product_walk(&[sup], &se).0 {
                out.push((s.clone(), e));
            }
        }
    }
    out
}
