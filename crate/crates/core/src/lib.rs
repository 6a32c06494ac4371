//! Supervisory control of discrete-event systems.
//!
//! Plants and supervisors are deterministic automata ([`Automaton`]) over
//! alphabets whose events are flagged controllable or uncontrollable.
//! Specifications written as regular expressions compile to minimal
//! automata ([`espec`]); plants compose synchronously ([`compose`]);
//! [`control`] checks controllability and nonconflict and synthesizes
//! supremal controllable supervisors; [`sim`] runs the modular closed loop.
//! [`fms`] ships the two-product flexible manufacturing cell as a corpus.

pub mod automaton;
pub mod compose;
pub mod control;
pub mod dot;
pub mod espec;
pub mod event;
pub mod fms;
pub mod model;
pub mod sim;

pub use automaton::{Automaton, AutomatonBuilder, MembershipVerdict, QueryError, StateId, Sublanguage};
pub use event::{Alphabet, AlphabetError, EventId, EventIdError};
pub use model::{validate, AutomatonFile, Diagnostic, ModelError};
