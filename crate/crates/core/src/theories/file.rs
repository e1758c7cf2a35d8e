//! The theory file format:
//!
//! ```text
//! (theory NAME
//!   (base B ...)
//!   (domain NAME (v1 v2 ...))
//!   (effect NAME [DOMAIN] ARITY)      ; ARITY is a count or a domain name
//!   (function NAME (S1 ... Sn -> T))
//!   (rule NAME LHS RHS [extended])
//!   (distribute NAME)
//!   (precedence (A > B) ...))         ; A, B are names or name[param]
//! ```
//!
//! Clauses may appear in any order; rules are read after all declarations.
//! A bare name in a precedence pair stands for every parameter instance.

use crate::kernel::{
    name, term_from_sexp, type_from_sexp, Arity, Domain, Signature, SymbolDecl, SymbolId,
};
use crate::rewrite::RewriteRule;
use crate::sexp::{self, Sexp};

use super::{Schema, TheoryDecl, TheoryError, Theory};

fn syntax(s: &Sexp, message: impl Into<String>) -> TheoryError {
    TheoryError::Syntax { span: s.span(), message: message.into() }
}

fn atom<'a>(s: &'a Sexp, what: &str) -> Result<&'a str, TheoryError> {
    s.as_atom().ok_or_else(|| syntax(s, format!("expected {what}")))
}

fn list<'a>(s: &'a Sexp, what: &str) -> Result<&'a [Sexp], TheoryError> {
    s.as_list().ok_or_else(|| syntax(s, format!("expected {what}")))
}

/// Parses and validates a theory file.
pub fn load_theory(text: &str) -> Result<Theory, TheoryError> {
    let top = sexp::parse_one(text).map_err(crate::kernel::ParseError::from)?;
    let items = list(&top, "a theory form")?;
    if top.head() != Some("theory") || items.len() < 2 {
        return Err(syntax(&top, "expected (theory NAME clause...)"));
    }
    let mut decl = TheoryDecl { name: atom(&items[1], "a theory name")?.to_string(), ..Default::default() };
    let clauses = &items[2..];

    for c in clauses {
        let parts = list(c, "a clause")?;
        match c.head() {
            Some("base") => {
                for b in &parts[1..] {
                    decl.base_types.push(name(atom(b, "a base type")?));
                }
            }
            Some("domain") => {
                if parts.len() != 3 {
                    return Err(syntax(c, "expected (domain NAME (values...))"));
                }
                let values = list(&parts[2], "a value list")?
                    .iter()
                    .map(|v| atom(v, "a value").map(name))
                    .collect::<Result<Vec<_>, _>>()?;
                decl.domains.push(Domain { name: name(atom(&parts[1], "a domain name")?), values });
            }
            Some("rule" | "distribute" | "precedence" | "effect" | "function") => {}
            Some(other) => return Err(syntax(c, format!("unknown clause `{other}`"))),
            None => return Err(syntax(c, "expected a clause keyword")),
        }
    }

    let domain = |s: &Sexp| -> Result<Option<Domain>, TheoryError> {
        let n = atom(s, "a domain or arity")?;
        Ok(decl.domains.iter().find(|d| &*d.name == n).cloned())
    };
    let mut symbols = Vec::new();
    for c in clauses {
        let parts = list(c, "a clause")?;
        match c.head() {
            Some("effect") => {
                let (dom, arity_at) = match parts.len() {
                    3 => (None, 2),
                    4 => {
                        let d = domain(&parts[2])?
                            .ok_or_else(|| syntax(&parts[2], "unknown parameter domain"))?;
                        (Some(d), 3)
                    }
                    _ => return Err(syntax(c, "expected (effect NAME [DOMAIN] ARITY)")),
                };
                let a = atom(&parts[arity_at], "an arity")?;
                let arity = match a.parse::<usize>() {
                    Ok(n) => n,
                    Err(_) => domain(&parts[arity_at])?
                        .ok_or_else(|| syntax(&parts[arity_at], "arity must be a count or a domain"))?
                        .values
                        .len(),
                };
                let n = atom(&parts[1], "a symbol name")?;
                symbols.push(SymbolDecl { name: name(n), domain: dom, arity: Arity::Effect(arity) });
            }
            Some("function") => {
                if parts.len() != 3 {
                    return Err(syntax(c, "expected (function NAME (S... -> T))"));
                }
                let sig = list(&parts[2], "a function signature")?;
                let arrow = sig
                    .iter()
                    .position(|s| s.as_atom() == Some("->"))
                    .ok_or_else(|| syntax(&parts[2], "missing `->`"))?;
                if arrow + 2 != sig.len() {
                    return Err(syntax(&parts[2], "expected exactly one result type after `->`"));
                }
                let params = sig[..arrow].iter().map(type_from_sexp).collect::<Result<Vec<_>, _>>()?;
                let result = type_from_sexp(&sig[arrow + 1])?;
                symbols.push(SymbolDecl::function(atom(&parts[1], "a symbol name")?, params, result));
            }
            _ => {}
        }
    }
    decl.symbols = symbols;

    let mut sig = Signature::new();
    for s in &decl.symbols {
        sig.declare(s.clone())?;
    }
    for c in clauses {
        let parts = list(c, "a clause")?;
        match c.head() {
            Some("rule") => {
                let extended = match parts.len() {
                    4 => false,
                    5 if parts[4].as_atom() == Some("extended") => true,
                    _ => return Err(syntax(c, "expected (rule NAME LHS RHS [extended])")),
                };
                let n = atom(&parts[1], "a rule name")?;
                let lhs = term_from_sexp(&parts[2], &sig)?;
                let rhs = term_from_sexp(&parts[3], &sig)?;
                let rule = if extended {
                    RewriteRule::extended(n, lhs, rhs)?
                } else {
                    RewriteRule::new(n, lhs, rhs)?
                };
                decl.rules.push(rule);
            }
            Some("distribute") => {
                if parts.len() != 2 {
                    return Err(syntax(c, "expected (distribute NAME)"));
                }
                decl.schemas.push(Schema::Distribute(name(atom(&parts[1], "a symbol name")?)));
            }
            Some("precedence") => {
                for pair in &parts[1..] {
                    let p = list(pair, "(A > B)")?;
                    if p.len() != 3 || p[1].as_atom() != Some(">") {
                        return Err(syntax(pair, "expected (A > B)"));
                    }
                    let lo = identities(&p[0], &sig)?;
                    let hi = identities(&p[2], &sig)?;
                    for a in &lo {
                        for b in &hi {
                            decl.precedence.push((a.clone(), b.clone()));
                        }
                    }
                }
            }
            _ => {}
        }
    }
    decl.build()
}

// `name` (all parameter instances) or `name[param]`.
fn identities(s: &Sexp, sig: &Signature) -> Result<Vec<SymbolId>, TheoryError> {
    let text = atom(s, "a symbol")?;
    let (n, param) = match text.strip_suffix(']').and_then(|t| t.split_once('[')) {
        Some((n, p)) => (n, Some(p)),
        None => (text, None),
    };
    let decl = sig.get(n).ok_or_else(|| TheoryError::UnknownPrecedenceSymbol(text.to_string()))?;
    let all = decl.identities();
    match param {
        None => Ok(all),
        Some(p) => match all.into_iter().find(|id| id.param.as_deref() == Some(p)) {
            Some(id) => Ok(vec![id]),
            None => Err(TheoryError::UnknownPrecedenceSymbol(text.to_string())),
        },
    }
}

pub(super) fn render(d: &TheoryDecl) -> String {
    let mut out = format!("(theory {}\n", d.name);
    for note in &d.notes {
        out.push_str(&format!("  ; {note}\n"));
    }
    if !d.base_types.is_empty() {
        let names: Vec<&str> = d.base_types.iter().map(|b| &**b).collect();
        out.push_str(&format!("  (base {})\n", names.join(" ")));
    }
    for dom in &d.domains {
        let values: Vec<&str> = dom.values.iter().map(|v| &**v).collect();
        out.push_str(&format!("  (domain {} ({}))\n", dom.name, values.join(" ")));
    }
    for s in &d.symbols {
        match &s.arity {
            Arity::Effect(n) => match &s.domain {
                Some(dom) => out.push_str(&format!("  (effect {} {} {n})\n", s.name, dom.name)),
                None => out.push_str(&format!("  (effect {} {n})\n", s.name)),
            },
            Arity::Function { params, result } => {
                let mut sig: Vec<String> = params.iter().map(ToString::to_string).collect();
                sig.push("->".into());
                sig.push(result.to_string());
                out.push_str(&format!("  (function {} ({}))\n", s.name, sig.join(" ")));
            }
        }
    }
    for schema in &d.schemas {
        let Schema::Distribute(p) = schema;
        out.push_str(&format!("  (distribute {p})\n"));
    }
    for r in &d.rules {
        let flag = if r.extended { " extended" } else { "" };
        out.push_str(&format!("  (rule {} {} {}{flag})\n", r.name, r.lhs, r.rhs));
    }
    if !d.precedence.is_empty() {
        let pairs: Vec<String> = d.precedence.iter().map(|(a, b)| format!("({a} > {b})")).collect();
        out.push_str(&format!("  (precedence {})\n", pairs.join(" ")));
    }
    out.push_str(")\n");
    out
}
