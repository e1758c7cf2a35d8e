//! A rewriting engine for a Moggi-style monadic metalanguage whose terms
//! carry algebraic effect symbols, together with a recursive path ordering
//! that certifies termination of effect rewrite systems from a symbol
//! precedence.

pub mod cli;
pub mod kernel;
pub mod rewrite;
pub mod rpo;
pub mod sexp;
pub mod theories;
