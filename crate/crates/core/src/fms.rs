//! Two-product flexible manufacturing cell: machine models, the total plant,
//! the desired-behaviour specifications and the two hand-built supervisors.
//!
//! Three conveyors (C1..C3), a robot (R), a lathe (L), a milling machine (M),
//! a painting machine (P) and an assembly machine (A), linked by one-slot
//! buffers B1..B8. Buffers have no automata of their own; they only show up
//! in robot pick/place event names. Category-1 products enter on C1 and go
//! through the mill and the lathe; category-2 products enter on C2 and go
//! through the lathe only. Both end at the assembly machine, optionally via
//! C3 and the painting machine.
//!
//! Two controllability partitions are shipped. [`Partition::Sec28`] (the
//! default) makes the conveyor moves and the assembly completions
//! uncontrollable; [`Partition::Sec2`] makes the conveyor loads and the
//! assembly completions uncontrollable.

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::automaton::{Automaton, AutomatonBuilder};
use crate::compose::{parallel, DEFAULT_DELIMITER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Machine {
    C1,
    C2,
    C3,
    R,
    L,
    M,
    P,
    A,
}

impl Machine {
    /// Composition order of the total plant.
    pub const ALL: [Machine; 8] =
        [Machine::C1, Machine::C2, Machine::C3, Machine::R, Machine::L, Machine::M, Machine::P, Machine::A];

    pub fn name(self) -> &'static str {
        match self {
            Machine::C1 => "C1",
            Machine::C2 => "C2",
            Machine::C3 => "C3",
            Machine::R => "R",
            Machine::L => "L",
            Machine::M => "M",
            Machine::P => "P",
            Machine::A => "A",
        }
    }
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown machine {0:?} (expected one of C1 C2 C3 R L M P A)")]
pub struct UnknownMachine(pub String);

impl FromStr for Machine {
    type Err = UnknownMachine;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Machine::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| UnknownMachine(s.to_string()))
    }
}

/// Which events are uncontrollable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Partition {
    /// Conveyor moves and assembly completions are uncontrollable.
    #[default]
    Sec28,
    /// Conveyor loads and assembly completions are uncontrollable.
    Sec2,
}

impl Partition {
    pub const ALL: [Partition; 2] = [Partition::Sec28, Partition::Sec2];

    pub fn name(self) -> &'static str {
        match self {
            Partition::Sec28 => "sec28",
            Partition::Sec2 => "sec2",
        }
    }

    pub fn uncontrollable(self) -> &'static [&'static str] {
        match self {
            Partition::Sec28 => &["C1.move", "C2.move", "C3.move", "A.done1", "A.done2"],
            Partition::Sec2 => &["C1.load", "C2.load", "C3.load", "A.done1", "A.done2"],
        }
    }

    pub fn is_controllable(self, event: &str) -> bool {
        !self.uncontrollable().contains(&event)
    }

    /// The full 34-event plant alphabet under this partition.
    pub fn alphabet(self) -> crate::event::Alphabet {
        crate::event::Alphabet::from_entries(
            EVENTS.iter().map(|e| (crate::event::EventId::new(e.id).expect("valid id"), self.is_controllable(e.id))),
        )
        .expect("unique ids")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown partition {0:?} (expected sec28 or sec2)")]
pub struct UnknownPartition(pub String);

impl FromStr for Partition {
    type Err = UnknownPartition;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Partition::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| UnknownPartition(s.to_string()))
    }
}

/// One row of the event table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventInfo {
    pub id: &'static str,
    /// Symbol used in the original model write-up.
    pub symbol: &'static str,
    pub description: &'static str,
    pub machine: Machine,
}

const fn ev(id: &'static str, symbol: &'static str, description: &'static str, machine: Machine) -> EventInfo {
    EventInfo { id, symbol, description, machine }
}

/// Every plant event, grouped by machine in composition order.
pub const EVENTS: [EventInfo; 34] = [
    ev("C1.load", "e_{C,1,1}", "product loaded onto conveyor C1", Machine::C1),
    ev("C1.move", "e_{C,1,2}", "conveyor C1 moves its product into buffer B1", Machine::C1),
    ev("C2.load", "e_{C,2,1}", "product loaded onto conveyor C2", Machine::C2),
    ev("C2.move", "e_{C,2,2}", "conveyor C2 moves its product into buffer B2", Machine::C2),
    ev("C3.load", "e_{C,3,1}", "product loaded onto conveyor C3 from buffer B7", Machine::C3),
    ev("C3.move", "e_{C,3,2}", "conveyor C3 moves its product into buffer B8", Machine::C3),
    ev("R.pick1", "e_{R,1}", "robot picks a product from buffer B1", Machine::R),
    ev("R.pick2", "e_{R,2}", "robot picks a product from buffer B2", Machine::R),
    ev("R.pick3", "e_{R,3}", "robot picks a product from buffer B3", Machine::R),
    ev("R.pick4", "e_{R,4}", "robot picks a product from buffer B4", Machine::R),
    ev("R.pick5", "e_{R,5}", "robot picks a product from buffer B5", Machine::R),
    ev("R.pick6", "e_{R,6}", "robot picks a product from buffer B6", Machine::R),
    ev("R.pick7", "e_{R,7}", "robot picks a product from buffer B7", Machine::R),
    ev("R.place1", "e_{R,8}", "robot places its product into buffer B1", Machine::R),
    ev("R.place2", "e_{R,9}", "robot places its product into buffer B2", Machine::R),
    ev("R.place3", "e_{R,10}", "robot places its product into buffer B3 (mill)", Machine::R),
    ev("R.place4", "e_{R,11}", "robot places its product into buffer B4 (lathe)", Machine::R),
    ev("R.place5", "e_{R,12}", "robot places its product into buffer B5 (assembly)", Machine::R),
    ev("R.place6", "e_{R,13}", "robot places its product into buffer B6 (assembly)", Machine::R),
    ev("R.place7", "e_{R,14}", "robot places its product into buffer B7 (C3 / assembly)", Machine::R),
    ev("L.start1", "e_{L,1}", "lathe loads a category-1 product and starts", Machine::L),
    ev("L.start2", "e_{L,2}", "lathe loads a category-2 product and starts", Machine::L),
    ev("L.done1", "e_{L,3}", "lathe finishes a category-1 product", Machine::L),
    ev("L.done2", "e_{L,4}", "lathe finishes a category-2 product", Machine::L),
    ev("M.start", "e_{M,1}", "mill loads a product and starts", Machine::M),
    ev("M.done", "e_{M,2}", "mill finishes", Machine::M),
    ev("P.start", "e_{P,1}", "painter loads a product and starts", Machine::P),
    ev("P.done", "e_{P,2}", "painter finishes", Machine::P),
    ev("A.on", "e_{A,1}", "assembly machine switched on", Machine::A),
    ev("A.fromB5", "e_{A,2}", "assemble the product in buffer B5", Machine::A),
    ev("A.fromB6", "e_{A,3}", "assemble the product in buffer B6", Machine::A),
    ev("A.fromB7", "e_{A,4}", "assemble the product in buffer B7", Machine::A),
    ev("A.done1", "e_{A,5}", "category-1 assembly completed", Machine::A),
    ev("A.done2", "e_{A,6}", "category-2 assembly completed", Machine::A),
];

pub fn event_info(id: &str) -> Option<&'static EventInfo> {
    EVENTS.iter().find(|e| e.id == id)
}

/// Events whose occurrence completes a product of category 1 and 2.
pub const COMPLETION_EVENTS: [(u8, &str); 2] = [(1, "A.done1"), (2, "A.done2")];

fn with_events(b: AutomatonBuilder, machine: Machine, partition: Partition) -> AutomatonBuilder {
    EVENTS.iter().filter(|e| e.machine == machine).fold(b, |b, e| b.event(e.id, partition.is_controllable(e.id)))
}

/// Machine automaton under the default partition.
pub fn build(machine: Machine) -> Automaton {
    build_with(machine, Partition::default())
}

pub fn build_with(machine: Machine, partition: Partition) -> Automaton {
    let prefix = format!("q{}_", machine.name());
    let q = |i: usize| format!("{prefix}{i}");
    let mut b = with_events(Automaton::builder(machine.name()), machine, partition);
    let n_states = if machine == Machine::A { 3 } else { 2 };
    for i in 1..=n_states {
        b = b.state(q(i));
    }
    b = b.initial(q(1)).marked(q(1));
    let events: Vec<&str> = EVENTS.iter().filter(|e| e.machine == machine).map(|e| e.id).collect();
    match machine {
        Machine::C1 | Machine::C2 | Machine::C3 | Machine::M | Machine::P => {
            b = b.transition(q(1), events[0], q(2)).transition(q(2), events[1], q(1));
        }
        Machine::R => {
            for lambda in 1..=7 {
                b = b.transition(q(1), format!("R.pick{lambda}"), q(2)).transition(
                    q(2),
                    format!("R.place{lambda}"),
                    q(1),
                );
            }
        }
        Machine::L => {
            for e in ["L.start1", "L.start2"] {
                b = b.transition(q(1), e, q(2));
            }
            for e in ["L.done1", "L.done2"] {
                b = b.transition(q(2), e, q(1));
            }
        }
        Machine::A => {
            b = b.transition(q(1), "A.on", q(2));
            for e in ["A.fromB5", "A.fromB6", "A.fromB7"] {
                b = b.transition(q(2), e, q(3));
            }
            for e in ["A.done1", "A.done2"] {
                b = b.transition(q(3), e, q(1));
            }
        }
    }
    b.build().expect("corpus machine is well formed")
}

/// Generated language of each machine as a specification expression; the
/// marked language is the same expression without the outer `pc(...)`.
pub fn machine_language(machine: Machine) -> String {
    let body = match machine {
        Machine::C1 => "(C1.load C1.move)*".to_string(),
        Machine::C2 => "(C2.load C2.move)*".to_string(),
        Machine::C3 => "(C3.load C3.move)*".to_string(),
        Machine::M => "(M.start M.done)*".to_string(),
        Machine::P => "(P.start P.done)*".to_string(),
        Machine::R => {
            let picks: Vec<String> = (1..=7).map(|l| format!("R.pick{l}")).collect();
            let places: Vec<String> = (1..=7).map(|l| format!("R.place{l}")).collect();
            format!("(({}) ({}))*", picks.join(" + "), places.join(" + "))
        }
        Machine::L => "((L.start1 + L.start2) (L.done1 + L.done2))*".to_string(),
        Machine::A => "(A.on (A.fromB5 + A.fromB6 + A.fromB7) (A.done1 + A.done2))*".to_string(),
    };
    format!("pc({body})")
}

/// `C1 || C2 || C3 || R || L || M || P || A` under the default partition.
pub fn build_total() -> Automaton {
    build_total_with(Partition::default())
}

pub fn build_total_with(partition: Partition) -> Automaton {
    let machines: Vec<Automaton> = Machine::ALL.iter().map(|&m| build_with(m, partition)).collect();
    let refs: Vec<&Automaton> = machines.iter().collect();
    parallel(&refs, DEFAULT_DELIMITER).expect("disjoint machine alphabets compose").with_name("G")
}

/// Desired behaviour of product category 1 or 2.
///
/// # Panics
/// On any other category.
pub fn spec_text(category: u8) -> &'static str {
    match category {
        1 => "pc((C1.load R.pick1 R.place3 M.start R.pick3 R.place4 L.start1 R.pick4 (R.place6 + R.place7 C3.load P.start C3.load) A.on)*)",
        2 => "pc((C2.load R.pick2 R.place4 L.start2 R.pick4 (R.place5 + R.place7 C3.load P.start C3.load) A.on)*)",
        _ => panic!("product category must be 1 or 2, got {category}"),
    }
}

/// Hand-built supervisor for category 1 or 2 under the default partition.
pub fn build_supervisor(category: u8) -> Automaton {
    build_supervisor_with(category, Partition::default())
}

/// # Panics
/// On a category other than 1 or 2.
pub fn build_supervisor_with(category: u8, partition: Partition) -> Automaton {
    let (alphabet, edges): (&[&str], &[(usize, &str, usize)]) = match category {
        1 => (
            &[
                "C1.load", "C3.load", "R.pick1", "R.pick3", "R.pick4", "R.place4", "R.place3", "R.place6", "R.place7",
                "M.start", "L.start1", "P.start", "A.on",
            ],
            &[
                (1, "C1.load", 2),
                (2, "R.pick1", 3),
                (3, "R.place3", 4),
                (4, "M.start", 5),
                (5, "R.pick3", 6),
                (6, "R.place4", 7),
                (7, "L.start1", 8),
                (8, "R.pick4", 9),
                (9, "R.place6", 10),
                (9, "R.place7", 11),
                (10, "A.on", 1),
                (11, "C3.load", 12),
                (12, "P.start", 13),
                (13, "C3.load", 14),
                (14, "A.on", 1),
            ],
        ),
        2 => (
            &[
                "C2.load", "C3.load", "R.pick2", "R.pick4", "R.place4", "R.place5", "R.place7", "L.start2", "P.start",
                "A.on",
            ],
            &[
                (1, "C2.load", 2),
                (2, "R.pick2", 3),
                (3, "R.place4", 4),
                (4, "L.start2", 5),
                (5, "R.pick4", 6),
                (6, "R.place5", 7),
                (6, "R.place7", 8),
                (7, "A.on", 1),
                (8, "C3.load", 9),
                (9, "P.start", 10),
                (10, "C3.load", 11),
                (11, "A.on", 1),
            ],
        ),
        _ => panic!("product category must be 1 or 2, got {category}"),
    };
    let n_states = edges.iter().map(|&(from, _, to)| from.max(to)).max().unwrap_or(1);
    let q = |i: usize| format!("qS{category}_{i}");
    let mut b = Automaton::builder(format!("S{category}"));
    for e in alphabet {
        b = b.event(*e, partition.is_controllable(e));
    }
    for i in 1..=n_states {
        b = b.state(q(i)).marked(q(i));
    }
    b = b.initial(q(1));
    for &(from, on, to) in edges {
        b = b.transition(q(from), on, q(to));
    }
    b.build().expect("corpus supervisor is well formed")
}

/// An entry of the corpus.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum CatalogEntry {
    Automaton(Automaton),
    Spec(&'static str),
}

/// Every model of the cell, keyed by the file stem it is emitted under.
#[derive(Debug, Clone)]
pub struct FmsCatalog {
    entries: Vec<(String, CatalogEntry)>,
}

impl FmsCatalog {
    pub fn new() -> Self {
        let mut entries = Vec::new();
        for m in Machine::ALL {
            entries.push((m.name().to_string(), CatalogEntry::Automaton(build(m))));
        }
        let g = build_total();
        entries.push(("G_total".to_string(), CatalogEntry::Automaton(g.clone())));
        entries.push(("G_total_sec2".to_string(), CatalogEntry::Automaton(build_total_with(Partition::Sec2))));
        let s1 = build_supervisor(1);
        let s2 = build_supervisor(2);
        entries.push(("S1".to_string(), CatalogEntry::Automaton(s1)));
        entries.push(("S2".to_string(), CatalogEntry::Automaton(s2)));
        entries.push(("KD1".to_string(), CatalogEntry::Spec(spec_text(1))));
        entries.push(("KD2".to_string(), CatalogEntry::Spec(spec_text(2))));
        FmsCatalog { entries }
    }

    pub fn get(&self, key: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, e)| e)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &CatalogEntry)> {
        self.entries.iter().map(|(k, e)| (k.as_str(), e))
    }

    pub fn automata(&self) -> impl Iterator<Item = (&str, &Automaton)> {
        self.entries().filter_map(|(k, e)| match e {
            CatalogEntry::Automaton(a) => Some((k, a)),
            CatalogEntry::Spec(_) => None,
        })
    }

    /// Tab-separated event table with a header row.
    pub fn events_tsv() -> String {
        let mut out = String::from("id\tsymbol\tdescription\tcontrollable_sec28\tcontrollable_sec2\n");
        for e in &EVENTS {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                e.id,
                e.symbol,
                e.description,
                Partition::Sec28.is_controllable(e.id),
                Partition::Sec2.is_controllable(e.id)
            ));
        }
        out
    }

    /// Write every entry to `dir` (`<key>.json`, `<key>.expr`, `events.tsv`).
    pub fn emit(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (key, entry) in &self.entries {
            let (path, body) = match entry {
                CatalogEntry::Automaton(a) => (dir.join(format!("{key}.json")), a.to_json()),
                CatalogEntry::Spec(text) => {
                    (dir.join(format!("{key}.expr")), format!("# desired behaviour, {key}\n{text}\n"))
                }
            };
            std::fs::write(&path, body)?;
            written.push(path);
        }
        let tsv = dir.join("events.tsv");
        std::fs::write(&tsv, Self::events_tsv())?;
        written.push(tsv);
        Ok(written)
    }
}

impl Default for FmsCatalog {
    fn default() -> Self {
        Self::new()
    }
}
