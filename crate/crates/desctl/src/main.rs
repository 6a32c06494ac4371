//! `desctl`: model checking, synthesis and simulation for discrete-event
//! systems from the command line.
//!
//! Exit codes: 0 when the checked property holds (or the command succeeded),
//! 1 when it fails, 2 on usage or input errors.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use des_core::fms::Partition;

#[derive(Debug, Parser)]
#[command(name = "desctl", version, about = "Supervisory control toolkit for discrete-event systems")]
struct Cli {
    /// Print machine-readable JSON on standard output
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check model files for structural errors
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Synchronous composition of two or more automata
    Compose {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Separator between component state names
        #[arg(long, default_value = "|")]
        delim: String,
    },
    /// Compile a specification expression to a minimal automaton
    CompileSpec {
        spec: PathBuf,
        /// Model file whose alphabet (ids and flags) the expression is compiled over
        #[arg(long)]
        alphabet: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Name of the resulting automaton (defaults to the file stem)
        #[arg(long)]
        name: Option<String>,
    },
    /// Check that a supervisor never disables an uncontrollable plant event
    CheckCtrl {
        #[arg(long)]
        plant: PathBuf,
        #[arg(long)]
        sup: PathBuf,
        /// Override controllability flags with a corpus partition
        #[arg(long)]
        partition: Option<Partition>,
    },
    /// Check that a plant under a set of supervisors is nonblocking
    CheckConflict {
        #[arg(long)]
        plant: PathBuf,
        #[arg(long = "sup")]
        sups: Vec<PathBuf>,
        #[arg(long)]
        partition: Option<Partition>,
    },
    /// Supremal controllable sublanguage of a plant under a specification
    Synth {
        #[arg(long)]
        plant: PathBuf,
        /// Specification expression file
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        partition: Option<Partition>,
    },
    /// Run the plant under its supervisors
    Simulate(SimulateArgs),
    /// Graphviz rendering of an automaton
    ExportDot {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Flexible manufacturing cell corpus
    Fms {
        #[command(subcommand)]
        command: FmsCommand,
    },
    /// Minimal automaton with the same languages
    Minimize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the generated and marked languages of two automata
    Equivalent { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("policy").required(true).args(["script", "random", "interactive"]))]
struct SimulateArgs {
    #[arg(long)]
    plant: PathBuf,
    #[arg(long = "sup")]
    sups: Vec<PathBuf>,
    /// Whitespace-separated event ids, `#` comments allowed
    #[arg(long)]
    script: Option<PathBuf>,
    /// Uniform choice among enabled events
    #[arg(long, requires = "seed")]
    random: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    interactive: bool,
    /// Step budget
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Write the run report (JSON) here
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum FmsCommand {
    /// Write every corpus model, the specifications and the event table
    Emit {
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = output::Output::new(cli.json);
    match commands::run(cli.command, &out) {
        Ok(Verdict::Holds) => ExitCode::SUCCESS,
        Ok(Verdict::Fails) => ExitCode::from(1),
        Err(err) => {
            eprintln!("desctl: {err:#}");
            ExitCode::from(2)
        }
    }
}
