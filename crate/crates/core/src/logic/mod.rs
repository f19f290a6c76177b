//! First-order logic over incidence structures: sentences, model checking,
//! Hanf locality and the axioms of the limit theories.

pub mod eval;
pub mod formula;
pub mod hanf;
pub mod sentences;
pub mod theory;

pub use eval::{evaluate, CompiledSentence};
pub use formula::{parse_formula, Formula};
