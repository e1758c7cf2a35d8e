//! Terms, types, signatures and the typechecker.

pub mod syntax;
pub mod term;
pub mod typeck;
pub mod types;

pub use syntax::{parse_term, parse_type, print_term, term_from_sexp, type_from_sexp, ParseError};
pub use term::{fresh_name, name, Name, Position, SymbolId, SymbolKind, Term};
pub use typeck::{check_rule_sides, has_type, infer_open, infer_type, RuleTyping, TypeError};
pub use types::{Arity, Domain, Signature, SignatureError, SymbolDecl, Type, TypingContext};

/// `substitute(body, x, replacement)`: capture-avoiding `body{replacement/x}`.
pub fn substitute(body: &Term, x: &str, replacement: &Term) -> Term {
    body.substitute(x, replacement)
}

pub fn free_vars(t: &Term) -> std::collections::BTreeSet<Name> {
    t.free_vars()
}

pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    a.alpha_eq(b)
}
