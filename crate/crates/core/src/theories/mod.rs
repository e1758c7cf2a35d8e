//! Effect theories: a signature, symbolic rewrite rules, rule schemas and a
//! declared precedence, bundled and validated together.

mod builtin;
mod file;

use std::collections::BTreeSet;

use crate::kernel::{
    check_rule_sides, infer_open, Arity, Domain, Name, ParseError, Signature, SignatureError,
    SymbolDecl, SymbolId, SymbolKind, Term, Type, TypeError,
};
use crate::rewrite::{RewriteRule, RuleError};
use crate::rpo::{Precedence, PrecedenceError};
use crate::sexp::Span;

pub use builtin::{builtin, global_state, par, retry, BUILTIN_NAMES};
pub use file::load_theory;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{span}: {message}")]
    Syntax { span: Span, message: String },
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("rule `{rule}` is ill-typed ({side}): {source}")]
    RuleType { rule: String, side: &'static str, source: TypeError },
    #[error(transparent)]
    Precedence(#[from] PrecedenceError),
    #[error("unknown base type `{0}`")]
    UnknownBase(Name),
    #[error("unknown domain `{0}`")]
    UnknownDomain(Name),
    #[error("precedence mentions unknown symbol `{0}`")]
    UnknownPrecedenceSymbol(String),
    #[error("{what} `{name}` is declared twice")]
    Clash { what: &'static str, name: String },
    #[error("schema over `{symbol}`: {problem}")]
    Schema { symbol: Name, problem: String },
    #[error("unknown builtin theory `{0}`")]
    UnknownBuiltin(String),
}

/// A family of rules generated from the rest of the signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Schema {
    /// For a binary effect `p` and every other effect identity `e`:
    /// `p(e(s1..sn), t) ~> e(p(s1, t)..p(sn, t))` and
    /// `p(s, e(t1..tn)) ~> e(p(s, t1)..p(s, tn))`, with `p > e`.
    Distribute(Name),
}

/// The declared content of a theory, before schemas are instantiated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TheoryDecl {
    pub name: String,
    pub base_types: Vec<Name>,
    pub domains: Vec<Domain>,
    pub symbols: Vec<SymbolDecl>,
    pub rules: Vec<RewriteRule>,
    pub schemas: Vec<Schema>,
    pub precedence: Vec<(SymbolId, SymbolId)>,
    pub notes: Vec<String>,
}

/// A validated theory. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    decl: TheoryDecl,
    signature: Signature,
    rules: Vec<RewriteRule>,
    precedence: Precedence,
}

fn base_types_of(ty: &Type, out: &mut Vec<Name>) {
    match ty {
        Type::Base(b) => out.push(b.clone()),
        Type::Eff(t) => base_types_of(t, out),
        Type::Arrow(a, b) => {
            base_types_of(a, out);
            base_types_of(b, out);
        }
        Type::Var(_) => {}
    }
}

// Every symbol occurrence must agree with its declaration.
fn check_symbols(t: &Term, sig: &Signature) -> Result<(), SignatureError> {
    if let Term::Sym(id, _) = t {
        let params: Vec<&str> = id.param.iter().map(|p| &**p).collect();
        let resolved = sig.resolve(&id.name, &params, t.children().len())?;
        if resolved.kind != id.kind {
            return Err(SignatureError::Param {
                symbol: id.name.clone(),
                problem: format!("used as {:?} but declared as {:?}", id.kind, resolved.kind),
            });
        }
    }
    t.children().into_iter().try_for_each(|c| check_symbols(c, sig))
}

fn check_rule_typing(rule: &RewriteRule, sig: &Signature) -> Result<(), TheoryError> {
    let wrap = |side, source| TheoryError::RuleType { rule: rule.name.clone(), side, source };
    check_symbols(&rule.lhs, sig)?;
    check_symbols(&rule.rhs, sig)?;
    infer_open(&rule.lhs, sig).map_err(|e| wrap("lhs", e))?;
    infer_open(&rule.rhs, sig).map_err(|e| wrap("rhs", e))?;
    check_rule_sides(&rule.lhs, &rule.rhs, sig, !rule.extended).map_err(|e| wrap("lhs against rhs", e))?;
    Ok(())
}

fn distribute_rules(
    p: &Name,
    sig: &Signature,
) -> Result<(Vec<RewriteRule>, Vec<(SymbolId, SymbolId)>), TheoryError> {
    let problem = |m: &str| TheoryError::Schema { symbol: p.clone(), problem: m.to_string() };
    let decl = sig.get(p).ok_or_else(|| problem("symbol is not declared"))?;
    if decl.arity != Arity::Effect(2) || decl.domain.is_some() {
        return Err(problem("needs a binary effect without parameters"));
    }
    let pid = SymbolId::effect(p);
    let pv = |a: Term, b: Term| Term::Sym(pid.clone(), vec![a, b]);
    let mut rules = Vec::new();
    let mut pairs = Vec::new();
    for other in sig.decls().filter(|d| d.kind() == SymbolKind::Effect && d.name != *p) {
        let n = other.arg_count();
        for e in other.identities() {
            let vars = |stem: &str| (1..=n).map(|i| Term::var(&format!("{stem}{i}"))).collect::<Vec<_>>();
            let (s, t) = (Term::var("s"), Term::var("t"));
            let ss = vars("s");
            let left_lhs = pv(Term::Sym(e.clone(), ss.clone()), t.clone());
            let left_rhs = Term::Sym(e.clone(), ss.into_iter().map(|si| pv(si, t.clone())).collect());
            rules.push(RewriteRule::new(format!("{p}-left-{e}"), left_lhs, left_rhs)?);
            let ts = vars("t");
            let right_lhs = pv(s.clone(), Term::Sym(e.clone(), ts.clone()));
            let right_rhs = Term::Sym(e.clone(), ts.into_iter().map(|ti| pv(s.clone(), ti)).collect());
            rules.push(RewriteRule::new(format!("{p}-right-{e}"), right_lhs, right_rhs)?);
            pairs.push((pid.clone(), e));
        }
    }
    Ok((rules, pairs))
}

impl TheoryDecl {
    /// Validates the declarations, instantiates schemas and closes the
    /// precedence.
    pub fn build(self) -> Result<Theory, TheoryError> {
        let mut seen = BTreeSet::new();
        for d in &self.domains {
            if !seen.insert(d.name.clone()) {
                return Err(TheoryError::Clash { what: "domain", name: d.name.to_string() });
            }
        }
        let mut signature = Signature::new();
        for s in &self.symbols {
            if let Some(d) = &s.domain {
                if !self.domains.contains(d) {
                    return Err(TheoryError::UnknownDomain(d.name.clone()));
                }
            }
            if let Arity::Function { params, result } = &s.arity {
                let mut used = Vec::new();
                for t in params.iter().chain([result]) {
                    base_types_of(t, &mut used);
                }
                if let Some(b) = used.into_iter().find(|b| !self.base_types.contains(b)) {
                    return Err(TheoryError::UnknownBase(b));
                }
            }
            signature.declare(s.clone())?;
        }

        let mut rules = self.rules.clone();
        let mut pairs = self.precedence.clone();
        for schema in &self.schemas {
            match schema {
                Schema::Distribute(p) => {
                    let (r, ps) = distribute_rules(p, &signature)?;
                    rules.extend(r);
                    pairs.extend(ps);
                }
            }
        }
        let mut names = BTreeSet::new();
        for r in &rules {
            if !names.insert(r.name.clone()) {
                return Err(TheoryError::Clash { what: "rule", name: r.name.clone() });
            }
            check_rule_typing(r, &signature)?;
        }
        let known: BTreeSet<SymbolId> = signature.identities().into_iter().collect();
        for (a, b) in &pairs {
            for id in [a, b] {
                if !known.contains(id) {
                    return Err(TheoryError::UnknownPrecedenceSymbol(id.to_string()));
                }
            }
        }
        let precedence = Precedence::from_pairs(pairs)?;
        Ok(Theory { decl: self, signature, rules, precedence })
    }
}

impl Theory {
    pub fn name(&self) -> &str {
        &self.decl.name
    }

    pub fn decl(&self) -> &TheoryDecl {
        &self.decl
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Declared rules followed by schema instances.
    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&RewriteRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// Declared pairs plus those implied by schemas, transitively closed.
    pub fn precedence(&self) -> &Precedence {
        &self.precedence
    }

    pub fn notes(&self) -> &[String] {
        &self.decl.notes
    }

    /// The theory in the file grammar; `load_theory` reads it back.
    pub fn to_text(&self) -> String {
        file::render(&self.decl)
    }
}

/// The union of several theories. Symbol, domain and rule names must be
/// disjoint; base types may be shared. Schemas are instantiated again over
/// the combined signature.
pub fn compose(theories: &[Theory]) -> Result<Theory, TheoryError> {
    let mut out = TheoryDecl {
        name: theories.iter().map(Theory::name).collect::<Vec<_>>().join("+"),
        ..TheoryDecl::default()
    };
    for th in theories {
        let d = &th.decl;
        for b in &d.base_types {
            if !out.base_types.contains(b) {
                out.base_types.push(b.clone());
            }
        }
        for dom in &d.domains {
            if out.domains.iter().any(|x| x.name == dom.name) {
                return Err(TheoryError::Clash { what: "domain", name: dom.name.to_string() });
            }
            out.domains.push(dom.clone());
        }
        for s in &d.symbols {
            if out.symbols.iter().any(|x| x.name == s.name) {
                return Err(TheoryError::Clash { what: "symbol", name: s.name.to_string() });
            }
            out.symbols.push(s.clone());
        }
        out.rules.extend(d.rules.iter().cloned());
        for s in &d.schemas {
            if !out.schemas.contains(s) {
                out.schemas.push(s.clone());
            }
        }
        out.precedence.extend(d.precedence.iter().cloned());
        out.notes.extend(d.notes.iter().cloned());
    }
    out.build()
}
