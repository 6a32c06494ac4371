use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use des_core::compose::parallel;
use des_core::control::{check_controllability, check_nonconflicting, supcon, SupervisorSet};
use des_core::dot::to_dot;
use des_core::espec::{compile, equivalent, minimize, parse};
use des_core::fms::{FmsCatalog, Partition};
use des_core::model::{find_duplicate_transition, read_model, validate, ModelError};
use des_core::sim::{parse_script, Policy, SimError, Simulator};
use des_core::{Alphabet, Automaton, EventId};
use serde_json::{json, Value};

use crate::output::Output;
use crate::{Command, FmsCommand, SimulateArgs, Verdict};

pub fn run(command: Command, out: &Output) -> Result<Verdict> {
    match command {
        Command::Validate { files } => validate_files(&files, out),
        Command::Compose { files, output, delim } => {
            let autos = files.iter().map(|f| load(f)).collect::<Result<Vec<_>>>()?;
            let refs: Vec<&Automaton> = autos.iter().collect();
            let g = parallel(&refs, &delim)?;
            write_model(&g, output.as_deref(), out)
        }
        Command::CompileSpec { spec, alphabet, output, name } => {
            let expr = parse(&read_text(&spec)?).with_context(|| format!("parsing {}", spec.display()))?;
            let alphabet = load(&alphabet)?.alphabet().clone();
            let name = name.unwrap_or_else(|| stem(&spec));
            let a = compile(&expr, &alphabet)?.with_name(name);
            write_model(&a, output.as_deref(), out)
        }
        Command::CheckCtrl { plant, sup, partition } => {
            let plant = with_partition(load(&plant)?, partition);
            let sup = with_partition(load(&sup)?, partition);
            let r = check_controllability(&plant, &sup)?;
            if out.json {
                out.emit_json(&serde_json::to_value(&r)?);
            } else if let Some(cx) = &r.counterexample {
                eprintln!(
                    "{}: {} disables uncontrollable {} after {} event(s)",
                    out.bad("not controllable"),
                    sup.name(),
                    cx.event,
                    cx.string.len()
                );
                println!("{}", counterexample_line(&cx.string, &cx.event));
            } else {
                println!("{} ({} states checked)", out.good("controllable"), r.states_checked);
            }
            Ok(verdict(r.controllable))
        }
        Command::CheckConflict { plant, sups, partition } => {
            let plant = with_partition(load(&plant)?, partition);
            let sups = load_sups(&sups, partition)?;
            let r = check_nonconflicting(&plant, &sups)?;
            if out.json {
                out.emit_json(&serde_json::to_value(&r)?);
            } else if let Some(w) = &r.witness {
                eprintln!(
                    "{}: {} of {} closed-loop states cannot reach a marked state",
                    out.bad("blocking"),
                    r.blocking_states,
                    r.states
                );
                println!("{}", string_line(w));
            } else {
                println!("{} ({} states)", out.good("nonblocking"), r.states);
            }
            Ok(verdict(r.nonblocking))
        }
        Command::Synth { plant, spec, output, partition } => {
            let plant = with_partition(load(&plant)?, partition);
            let expr = parse(&read_text(&spec)?).with_context(|| format!("parsing {}", spec.display()))?;
            let alphabet = mentioned_alphabet(&plant, &expr.symbols())?;
            let k = compile(&expr, &alphabet)?.with_name(stem(&spec));
            let s = supcon(&plant, &k)?;
            write_model(&s, output.as_deref(), out)?;
            if s.is_empty() {
                eprintln!("{}: no controllable nonblocking behaviour remains", out.bad("empty"));
            }
            Ok(verdict(!s.is_empty()))
        }
        Command::Simulate(args) => simulate(args, out),
        Command::ExportDot { file, output } => {
            let dot = to_dot(&load(&file)?);
            match output {
                Some(path) => {
                    write_text(&path, &dot)?;
                    if out.json {
                        out.emit_json(&json!({ "written": path }));
                    }
                }
                None if out.json => out.emit_json(&json!({ "dot": dot })),
                None => print!("{dot}"),
            }
            Ok(Verdict::Holds)
        }
        Command::Fms { command: FmsCommand::Emit { output } } => {
            let written = FmsCatalog::new().emit(&output).with_context(|| format!("writing {}", output.display()))?;
            if out.json {
                out.emit_json(&json!({ "written": written }));
            } else {
                for p in &written {
                    println!("{}", p.display());
                }
            }
            Ok(Verdict::Holds)
        }
        Command::Minimize { file, output } => {
            let m = minimize(&load(&file)?);
            write_model(&m, output.as_deref(), out)
        }
        Command::Equivalent { a, b } => {
            let (a, b) = (load(&a)?, load(&b)?);
            let r = equivalent(&a, &b);
            if out.json {
                out.emit_json(&serde_json::to_value(&r)?);
            } else if let Some(w) = &r.witness {
                eprintln!("{}: {} and {} disagree on", out.bad("not equivalent"), a.name(), b.name());
                println!("{}", string_line(w));
            } else {
                println!("{}", out.good("equivalent"));
            }
            Ok(verdict(r.equivalent))
        }
    }
}

fn verdict(holds: bool) -> Verdict {
    if holds {
        Verdict::Holds
    } else {
        Verdict::Fails
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load(path: &Path) -> Result<Automaton> {
    Automaton::load(path).with_context(|| format!("loading {}", path.display()))
}

fn load_sups(paths: &[PathBuf], partition: Option<Partition>) -> Result<SupervisorSet> {
    paths.iter().map(|p| load(p).map(|a| with_partition(a, partition))).collect()
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "spec".to_string())
}

/// Corpus events take their flags from `partition`; anything else keeps its own.
fn with_partition(a: Automaton, partition: Option<Partition>) -> Automaton {
    match partition {
        Some(p) => a.relabeled(&p.alphabet()),
        None => a,
    }
}

/// The plant events an expression mentions, in plant order and with plant flags.
fn mentioned_alphabet(plant: &Automaton, symbols: &[&str]) -> Result<Alphabet> {
    if let Some(missing) = symbols.iter().find(|s| !plant.alphabet().contains(s)) {
        bail!("specification mentions {missing}, which {} does not declare", plant.name());
    }
    let entries = plant.alphabet().iter().filter(|(e, _)| symbols.contains(&e.as_str())).map(|(e, c)| (e.clone(), c));
    Ok(Alphabet::from_entries(entries)?)
}

fn string_line(s: &[EventId]) -> String {
    s.iter().map(|e| e.as_str()).collect::<Vec<_>>().join(" ")
}

fn counterexample_line(s: &[EventId], e: &EventId) -> String {
    let prefix = string_line(s);
    if prefix.is_empty() {
        format!("| {e}")
    } else {
        format!("{prefix} | {e}")
    }
}

/// Model JSON to `path` (summary on stdout) or to stdout.
fn write_model(a: &Automaton, path: Option<&Path>, out: &Output) -> Result<Verdict> {
    match path {
        Some(path) => {
            a.save(path).with_context(|| format!("writing {}", path.display()))?;
            if out.json {
                out.emit_json(&json!({
                    "written": path,
                    "name": a.name(),
                    "states": a.num_states(),
                    "events": a.num_events(),
                    "transitions": a.num_transitions(),
                }));
            } else {
                println!(
                    "{}: {} states, {} events, {} transitions -> {}",
                    a.name(),
                    a.num_states(),
                    a.num_events(),
                    a.num_transitions(),
                    path.display()
                );
            }
        }
        None => print!("{}", a.to_json()),
    }
    Ok(Verdict::Holds)
}

fn validate_files(files: &[PathBuf], out: &Output) -> Result<Verdict> {
    let mut results = Vec::new();
    let mut all_valid = true;
    for path in files {
        let problems: Vec<String> = match read_model(path) {
            Ok(file) => {
                let mut p: Vec<String> = validate(&file).iter().map(|d| d.to_string()).collect();
                if let Some((index, t)) = find_duplicate_transition(&file) {
                    p.push(
                        ModelError::DuplicateTransition { index, from: t.from.clone(), on: t.on.clone() }.to_string(),
                    );
                }
                p
            }
            Err(ModelError::Io { .. }) => bail!("cannot read {}", path.display()),
            Err(err) => vec![err.to_string()],
        };
        all_valid &= problems.is_empty();
        results.push((path, problems));
    }
    if out.json {
        let v: Vec<Value> = results
            .iter()
            .map(|(p, problems)| json!({ "file": p, "valid": problems.is_empty(), "problems": problems }))
            .collect();
        out.emit_json(&Value::Array(v));
    } else {
        for (p, problems) in &results {
            if problems.is_empty() {
                println!("{}: {}", p.display(), out.good("ok"));
            } else {
                println!("{}: {}", p.display(), out.bad("invalid"));
                for msg in problems {
                    println!("  {msg}");
                }
            }
        }
    }
    Ok(verdict(all_valid))
}

fn simulate(args: SimulateArgs, out: &Output) -> Result<Verdict> {
    let plant = load(&args.plant)?;
    let sups = load_sups(&args.sups, None)?;
    let sim = Simulator::new(&plant, &sups)?;
    let report = if let Some(script) = &args.script {
        let events = parse_script(&read_text(script)?).with_context(|| format!("reading {}", script.display()))?;
        sim.run(&Policy::Scripted(events), args.steps)?
    } else if args.random {
        let seed = args.seed.expect("clap requires --seed with --random");
        sim.run(&Policy::Random { seed }, args.steps)?
    } else {
        let stdin = io::stdin();
        sim.run_interactive(stdin.lock(), io::stderr(), args.steps)?
    };
    if let Some(path) = &args.report {
        write_text(path, &report.to_json())?;
    }

    let blocker = report.blocked_event.as_ref().map(|e| {
        let cfg = report.trace.last().map(|s| s.configuration.clone()).unwrap_or_else(|| sim.initial());
        match sim.fire(&cfg, e.as_str()) {
            Err(SimError::NotEnabled { blocker, .. }) => blocker.to_string(),
            _ => "unknown".to_string(),
        }
    });
    if out.json {
        print!("{}", report.to_json());
    } else {
        println!("trace: {}", string_line(&report.events()));
        println!("steps: {}", report.steps_taken);
        for (category, n) in &report.completions {
            println!("completed (category {category}): {n}");
        }
        if let (Some(e), Some(b)) = (&report.blocked_event, &blocker) {
            println!("{} at step {}: {e} refused by {b}", out.bad("blocked"), report.steps_taken + 1);
        }
        if report.deadlocked {
            let kind = if report.marked { "deadlock (marked)" } else { "deadlock" };
            println!("{}", out.bad(kind));
        }
    }
    Ok(verdict(report.blocked_event.is_none() && !report.deadlocked))
}
