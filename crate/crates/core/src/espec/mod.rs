//! Regular-expression specifications: parsing, compilation to minimal
//! automata, minimization and language equivalence.

mod compile;
mod equivalence;
mod minimize;
mod parse;

pub use compile::{compile, prefix_close, CompileError};
pub use equivalence::{equivalent, Equivalence};
pub use minimize::minimize;
pub use parse::{parse, Expr, ParseError};
