//! Step-by-step execution of a plant under modular supervision.
//!
//! The simulator steps the component automata directly instead of the
//! precomposed closed loop. An event is enabled when the plant can execute it
//! and every supervisor declaring it can too; firing moves the plant and the
//! declaring supervisors only.
//!
//! Random runs draw from `rand_chacha::ChaCha8Rng::seed_from_u64(seed)`: at each
//! step the enabled events are listed in plant declaration order and one is
//! picked with `gen_range(0..n)`. The same seed gives the same trace on every
//! platform.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::{Automaton, StateId};
use crate::control::{check_alphabet, ControlError, SupervisorSet};
use crate::event::{EventId, EventIdError};
use crate::fms::COMPLETION_EVENTS;

/// Plant state plus one state per supervisor, by name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub plant_state: String,
    pub sup_states: Vec<String>,
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.plant_state)?;
        for s in &self.sup_states {
            write!(f, " / {s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Policy {
    Scripted(Vec<EventId>),
    Random { seed: u64 },
    Interactive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub event: EventId,
    pub configuration: Configuration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub trace: Vec<TraceStep>,
    pub steps_taken: usize,
    /// Nothing was enabled at the end and the step budget was not used up.
    pub deadlocked: bool,
    /// First script event that was not enabled.
    pub blocked_event: Option<EventId>,
    /// Whether the final configuration is marked in the plant and every supervisor.
    pub marked: bool,
    /// Completed products per category.
    pub completions: BTreeMap<u8, usize>,
}

impl RunReport {
    pub fn events(&self) -> Vec<EventId> {
        self.trace.iter().map(|s| s.event.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Who refused an event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Blocker {
    Plant(String),
    Supervisor { index: usize, name: String },
}

impl fmt::Display for Blocker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Blocker::Plant(name) => write!(f, "plant {name}"),
            Blocker::Supervisor { index, name } => write!(f, "supervisor {name} (#{index})"),
        }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Alphabet(#[from] ControlError),
    #[error("{0} has no states")]
    EmptyAutomaton(String),
    #[error("event {0:?} is not in the plant alphabet")]
    UnknownEvent(String),
    #[error("script event {index} ({event}) is not in the plant alphabet")]
    ScriptEvent { index: usize, event: EventId },
    #[error("invalid script: {0}")]
    Script(#[from] EventIdError),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("{event} is not enabled: blocked by {blocker}")]
    NotEnabled { event: EventId, blocker: Blocker },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Event ids from a script: whitespace separated, `#` starts a comment.
pub fn parse_script(text: &str) -> Result<Vec<EventId>, EventIdError> {
    text.lines().flat_map(|line| line.split('#').next().unwrap_or("").split_whitespace()).map(EventId::new).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Ids {
    plant: StateId,
    sups: Vec<StateId>,
}

pub struct Simulator<'a> {
    plant: &'a Automaton,
    sups: Vec<&'a Automaton>,
    /// for each plant event, the (supervisor, local event) pairs declaring it
    participants: Vec<Vec<(usize, usize)>>,
    initial: Ids,
}

impl<'a> Simulator<'a> {
    pub fn new(plant: &'a Automaton, sups: &'a SupervisorSet) -> Result<Self, SimError> {
        for s in sups.iter() {
            check_alphabet(plant, s)?;
        }
        let x0 = plant.initial().ok_or_else(|| SimError::EmptyAutomaton(plant.name().to_string()))?;
        let y0 = sups
            .iter()
            .map(|s| s.initial().ok_or_else(|| SimError::EmptyAutomaton(s.name().to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let participants = plant
            .alphabet()
            .events()
            .iter()
            .map(|e| {
                sups.iter().enumerate().filter_map(|(i, s)| s.alphabet().index_of(e.as_str()).map(|l| (i, l))).collect()
            })
            .collect();
        Ok(Simulator { plant, sups: sups.iter().collect(), participants, initial: Ids { plant: x0, sups: y0 } })
    }

    pub fn initial(&self) -> Configuration {
        self.names(&self.initial)
    }

    pub fn enabled(&self, cfg: &Configuration) -> Result<Vec<EventId>, SimError> {
        let ids = self.ids(cfg)?;
        Ok(self.enabled_ids(&ids).into_iter().map(|e| self.plant.alphabet().event(e).clone()).collect())
    }

    pub fn fire(&self, cfg: &Configuration, event: &str) -> Result<Configuration, SimError> {
        let ids = self.ids(cfg)?;
        let e = self.plant.alphabet().index_of(event).ok_or_else(|| SimError::UnknownEvent(event.to_string()))?;
        Ok(self.names(&self.fire_ids(&ids, e)?))
    }

    pub fn is_marked(&self, cfg: &Configuration) -> Result<bool, SimError> {
        let ids = self.ids(cfg)?;
        Ok(self.marked_ids(&ids))
    }

    pub fn run(&self, policy: &Policy, max_steps: usize) -> Result<RunReport, SimError> {
        match policy {
            Policy::Scripted(script) => self.run_script(script, max_steps),
            Policy::Random { seed } => Ok(self.run_random(*seed, max_steps)),
            Policy::Interactive => {
                let stdin = io::stdin();
                let stdout = io::stdout();
                self.run_interactive(stdin.lock(), stdout.lock(), max_steps)
            }
        }
    }

    fn run_script(&self, script: &[EventId], max_steps: usize) -> Result<RunReport, SimError> {
        let alphabet = self.plant.alphabet();
        let script: Vec<usize> = script
            .iter()
            .enumerate()
            .map(|(index, e)| {
                alphabet.index_of(e.as_str()).ok_or_else(|| SimError::ScriptEvent { index, event: e.clone() })
            })
            .collect::<Result<_, _>>()?;
        let mut run = Run::new(self);
        let mut blocked = None;
        for &e in script.iter().take(max_steps) {
            match self.fire_ids(&run.current, e) {
                Ok(next) => run.push(e, next),
                Err(_) => {
                    blocked = Some(alphabet.event(e).clone());
                    break;
                }
            }
        }
        Ok(run.finish(max_steps, blocked))
    }

    fn run_random(&self, seed: u64, max_steps: usize) -> RunReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut run = Run::new(self);
        while run.len() < max_steps {
            let enabled = self.enabled_ids(&run.current);
            if enabled.is_empty() {
                break;
            }
            let e = enabled[rng.gen_range(0..enabled.len())];
            let next = self.fire_ids(&run.current, e).expect("enabled event fires");
            run.push(e, next);
        }
        run.finish(max_steps, None)
    }

    /// Line-oriented REPL: pick an enabled event by number or id, or type
    /// `undo`, `state` or `quit`. Stops at `max_steps`, deadlock or end of input.
    pub fn run_interactive<R: BufRead, W: Write>(
        &self,
        input: R,
        mut out: W,
        max_steps: usize,
    ) -> Result<RunReport, SimError> {
        let mut run = Run::new(self);
        let mut lines = input.lines();
        loop {
            if run.len() >= max_steps {
                writeln!(out, "step limit reached")?;
                break;
            }
            let enabled = self.enabled_ids(&run.current);
            if enabled.is_empty() {
                writeln!(out, "deadlock at {}", self.names(&run.current))?;
                break;
            }
            writeln!(out, "step {}:", run.len() + 1)?;
            for (i, &e) in enabled.iter().enumerate() {
                writeln!(out, "  {}) {}", i + 1, self.plant.alphabet().event(e))?;
            }
            write!(out, "> ")?;
            out.flush()?;
            let Some(line) = lines.next() else {
                writeln!(out)?;
                break;
            };
            let line = line?;
            match line.trim() {
                "" => {}
                "quit" => break,
                "state" => writeln!(out, "{}", self.names(&run.current))?,
                "undo" => {
                    if !run.undo() {
                        writeln!(out, "nothing to undo")?;
                    }
                }
                choice => {
                    let picked = match choice.parse::<usize>() {
                        Ok(n) if (1..=enabled.len()).contains(&n) => Some(enabled[n - 1]),
                        Ok(_) => None,
                        Err(_) => self.plant.alphabet().index_of(choice).filter(|e| enabled.contains(e)),
                    };
                    match picked {
                        Some(e) => {
                            let next = self.fire_ids(&run.current, e).expect("enabled event fires");
                            run.push(e, next);
                        }
                        None => writeln!(out, "not an enabled choice: {choice}")?,
                    }
                }
            }
        }
        Ok(run.finish(max_steps, None))
    }

    /// Re-fire `report`'s trace from the initial configuration.
    pub fn replay(&self, report: &RunReport) -> bool {
        if report.steps_taken != report.trace.len() {
            return false;
        }
        let mut current = self.initial.clone();
        for step in &report.trace {
            let Some(e) = self.plant.alphabet().index_of(step.event.as_str()) else {
                return false;
            };
            let Ok(next) = self.fire_ids(&current, e) else {
                return false;
            };
            if self.names(&next) != step.configuration {
                return false;
            }
            current = next;
        }
        true
    }

    fn enabled_ids(&self, ids: &Ids) -> Vec<usize> {
        self.plant.active_ids(ids.plant).filter(|&e| self.blocker(ids, e).is_none()).collect()
    }

    fn blocker(&self, ids: &Ids, e: usize) -> Option<Blocker> {
        if self.plant.next(ids.plant, e).is_none() {
            return Some(Blocker::Plant(self.plant.name().to_string()));
        }
        self.participants[e]
            .iter()
            .find(|&&(i, l)| self.sups[i].next(ids.sups[i], l).is_none())
            .map(|&(index, _)| Blocker::Supervisor { index, name: self.sups[index].name().to_string() })
    }

    fn fire_ids(&self, ids: &Ids, e: usize) -> Result<Ids, SimError> {
        if let Some(blocker) = self.blocker(ids, e) {
            return Err(SimError::NotEnabled { event: self.plant.alphabet().event(e).clone(), blocker });
        }
        let mut next = ids.clone();
        next.plant = self.plant.next(ids.plant, e).expect("checked");
        for &(i, l) in &self.participants[e] {
            next.sups[i] = self.sups[i].next(ids.sups[i], l).expect("checked");
        }
        Ok(next)
    }

    fn marked_ids(&self, ids: &Ids) -> bool {
        self.plant.is_marked(ids.plant) && self.sups.iter().zip(&ids.sups).all(|(s, &q)| s.is_marked(q))
    }

    fn names(&self, ids: &Ids) -> Configuration {
        Configuration {
            plant_state: self.plant.state_name(ids.plant).to_string(),
            sup_states: self.sups.iter().zip(&ids.sups).map(|(s, &q)| s.state_name(q).to_string()).collect(),
        }
    }

    fn ids(&self, cfg: &Configuration) -> Result<Ids, SimError> {
        let plant = self.plant.state_id(&cfg.plant_state).ok_or_else(|| {
            SimError::InvalidConfiguration(format!("{:?} is not a state of {}", cfg.plant_state, self.plant.name()))
        })?;
        if cfg.sup_states.len() != self.sups.len() {
            return Err(SimError::InvalidConfiguration(format!(
                "{} supervisor states given for {} supervisors",
                cfg.sup_states.len(),
                self.sups.len()
            )));
        }
        let sups = self
            .sups
            .iter()
            .zip(&cfg.sup_states)
            .map(|(s, name)| {
                s.state_id(name)
                    .ok_or_else(|| SimError::InvalidConfiguration(format!("{name:?} is not a state of {}", s.name())))
            })
            .collect::<Result<_, _>>()?;
        Ok(Ids { plant, sups })
    }
}

/// Trace under construction.
struct Run<'s, 'a> {
    sim: &'s Simulator<'a>,
    events: Vec<usize>,
    states: Vec<Ids>,
    current: Ids,
}

impl<'s, 'a> Run<'s, 'a> {
    fn new(sim: &'s Simulator<'a>) -> Self {
        Run { sim, events: Vec::new(), states: Vec::new(), current: sim.initial.clone() }
    }

    fn len(&self) -> usize {
        self.events.len()
    }

    fn push(&mut self, e: usize, next: Ids) {
        self.events.push(e);
        self.states.push(next.clone());
        self.current = next;
    }

    fn undo(&mut self) -> bool {
        if self.events.pop().is_none() {
            return false;
        }
        self.states.pop();
        self.current = self.states.last().cloned().unwrap_or_else(|| self.sim.initial.clone());
        true
    }

    fn finish(self, max_steps: usize, blocked_event: Option<EventId>) -> RunReport {
        let sim = self.sim;
        let alphabet = sim.plant.alphabet();
        let mut completions: BTreeMap<u8, usize> = COMPLETION_EVENTS.iter().map(|&(c, _)| (c, 0)).collect();
        let trace: Vec<TraceStep> = self
            .events
            .iter()
            .zip(&self.states)
            .map(|(&e, ids)| {
                let event = alphabet.event(e).clone();
                if let Some(&(c, _)) = COMPLETION_EVENTS.iter().find(|(_, id)| *id == event.as_str()) {
                    *completions.entry(c).or_default() += 1;
                }
                TraceStep { event, configuration: sim.names(ids) }
            })
            .collect();
        let steps_taken = trace.len();
        let deadlocked = steps_taken < max_steps && sim.enabled_ids(&self.current).is_empty();
        RunReport { trace, steps_taken, deadlocked, blocked_event, marked: sim.marked_ids(&self.current), completions }
    }
}
