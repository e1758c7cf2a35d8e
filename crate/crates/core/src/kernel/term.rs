use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Variable, binder and symbol names. Cheap to clone.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Effect symbols commute with `let` (eff-assoc); function symbols do not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    Effect,
    Function,
}

/// A rewritable symbol instance: the symbol name together with its effect
/// parameter, so `assign` at parameter `1` and at `2` are distinct
/// identities. The kind is fixed by the signature for a given name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId {
    pub name: Name,
    pub param: Option<Name>,
    pub kind: SymbolKind,
}

impl SymbolId {
    pub fn effect(name: &str) -> Self {
        SymbolId { name: self::name(name), param: None, kind: SymbolKind::Effect }
    }

    pub fn effect_with(name: &str, param: &str) -> Self {
        SymbolId {
            name: self::name(name),
            param: Some(self::name(param)),
            kind: SymbolKind::Effect,
        }
    }

    pub fn function(name: &str) -> Self {
        SymbolId { name: self::name(name), param: None, kind: SymbolKind::Function }
    }

    pub fn is_effect(&self) -> bool {
        self.kind == SymbolKind::Effect
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.param {
            Some(p) => write!(f, "{}[{}]", self.name, p),
            None => write!(f, "{}", self.name),
        }
    }
}

/// Terms of the metalanguage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name),
    Lam(Name, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pure(Box<Term>),
    /// `Let(x, subject, body)` binds `x` in `body` only.
    Let(Name, Box<Term>, Box<Term>),
    Sym(SymbolId, Vec<Term>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(name(x))
    }

    pub fn lam(x: &str, body: Term) -> Term {
        Term::Lam(name(x), Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    pub fn pure(t: Term) -> Term {
        Term::Pure(Box::new(t))
    }

    pub fn let_(x: &str, subject: Term, body: Term) -> Term {
        Term::Let(name(x), Box::new(subject), Box::new(body))
    }

    pub fn sym(id: SymbolId, args: Vec<Term>) -> Term {
        Term::Sym(id, args)
    }

    pub fn eff(sym: &str, args: Vec<Term>) -> Term {
        Term::Sym(SymbolId::effect(sym), args)
    }

    pub fn eff_with(sym: &str, param: &str, args: Vec<Term>) -> Term {
        Term::Sym(SymbolId::effect_with(sym, param), args)
    }

    pub fn func(sym: &str, args: Vec<Term>) -> Term {
        Term::Sym(SymbolId::function(sym), args)
    }

    /// Immediate subterms, in position order.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) => vec![],
            Term::Lam(_, b) | Term::Pure(b) => vec![b],
            Term::App(f, a) => vec![f, a],
            Term::Let(_, s, b) => vec![s, b],
            Term::Sym(_, args) => args.iter().collect(),
        }
    }

    fn child_mut(&mut self, i: usize) -> Option<&mut Term> {
        match (self, i) {
            (Term::Lam(_, b), 0) | (Term::Pure(b), 0) => Some(b),
            (Term::App(f, _), 0) => Some(f),
            (Term::App(_, a), 1) => Some(a),
            (Term::Let(_, s, _), 0) => Some(s),
            (Term::Let(_, _, b), 1) => Some(b),
            (Term::Sym(_, args), i) => args.get_mut(i),
            _ => None,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Term::size).sum::<usize>()
    }

    pub fn subterm_at(&self, pos: &Position) -> Option<&Term> {
        let mut cur = self;
        for &i in &pos.0 {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Returns a copy of `self` with the subterm at `pos` replaced.
    pub fn replace_at(&self, pos: &Position, replacement: Term) -> Option<Term> {
        let mut out = self.clone();
        let mut cur = &mut out;
        for &i in &pos.0 {
            cur = cur.child_mut(i)?;
        }
        *cur = replacement;
        Some(out)
    }

    /// True for the binder-free fragment built from variables and symbols.
    pub fn is_symbolic(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Sym(_, args) => args.iter().all(Term::is_symbolic),
            _ => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Lam(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::Let(x, s, b) => {
                s.collect_free(bound, out);
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            Term::Pure(t) => t.collect_free(bound, out),
            Term::Sym(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
        }
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => &**y == x,
            Term::Lam(y, b) => &**y != x && b.has_free(x),
            Term::Let(y, s, b) => s.has_free(x) || (&**y != x && b.has_free(x)),
            Term::App(f, a) => f.has_free(x) || a.has_free(x),
            Term::Pure(t) => t.has_free(x),
            Term::Sym(_, args) => args.iter().any(|a| a.has_free(x)),
        }
    }

    /// Capture-avoiding `self{replacement/x}`.
    pub fn substitute(&self, x: &str, replacement: &Term) -> Term {
        let mut map = BTreeMap::new();
        map.insert(name(x), replacement.clone());
        self.substitute_many(&map)
    }

    /// Simultaneous capture-avoiding substitution. Bound variables that would
    /// capture a free variable of some replacement are renamed.
    pub fn substitute_many(&self, map: &BTreeMap<Name, Term>) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::Lam(x, b) => {
                let (x, b) = subst_under_binder(x, b, map);
                Term::Lam(x, Box::new(b))
            }
            Term::Let(x, s, b) => {
                let s = s.substitute_many(map);
                let (x, b) = subst_under_binder(x, b, map);
                Term::Let(x, Box::new(s), Box::new(b))
            }
            Term::App(f, a) => Term::app(f.substitute_many(map), a.substitute_many(map)),
            Term::Pure(t) => Term::pure(t.substitute_many(map)),
            Term::Sym(id, args) => {
                Term::Sym(id.clone(), args.iter().map(|a| a.substitute_many(map)).collect())
            }
        }
    }

    /// Alpha-equivalence.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha_eq_in(self, other, &mut Vec::new(), &mut Vec::new())
    }

    /// Representative of the alpha-equivalence class: every binder is
    /// renamed to `#d`, where `d` is its binding depth. Free variables are
    /// left alone; parsed names never start with `#`.
    pub fn canonical(&self) -> Term {
        self.canonical_in(&mut Vec::new())
    }

    fn canonical_in(&self, env: &mut Vec<(Name, Name)>) -> Term {
        match self {
            Term::Var(x) => match env.iter().rev().find(|(orig, _)| orig == x) {
                Some((_, c)) => Term::Var(c.clone()),
                None => self.clone(),
            },
            Term::Lam(x, b) => {
                let c = name(&format!("#{}", env.len()));
                env.push((x.clone(), c.clone()));
                let b = b.canonical_in(env);
                env.pop();
                Term::Lam(c, Box::new(b))
            }
            Term::Let(x, s, b) => {
                let s = s.canonical_in(env);
                let c = name(&format!("#{}", env.len()));
                env.push((x.clone(), c.clone()));
                let b = b.canonical_in(env);
                env.pop();
                Term::Let(c, Box::new(s), Box::new(b))
            }
            Term::App(f, a) => Term::app(f.canonical_in(env), a.canonical_in(env)),
            Term::Pure(t) => Term::pure(t.canonical_in(env)),
            Term::Sym(id, args) => {
                Term::Sym(id.clone(), args.iter().map(|a| a.canonical_in(env)).collect())
            }
        }
    }

    /// Every position in pre-order (parents before children, left to right).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn go(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Position>) {
            out.push(Position(path.clone()));
            for (i, c) in t.children().into_iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
        go(self, &mut path, &mut out);
        out
    }

    /// Symbol identities occurring anywhere in the term.
    pub fn symbols(&self) -> BTreeSet<SymbolId> {
        let mut out = BTreeSet::new();
        fn go(t: &Term, out: &mut BTreeSet<SymbolId>) {
            if let Term::Sym(id, _) = t {
                out.insert(id.clone());
            }
            t.children().into_iter().for_each(|c| go(c, out));
        }
        go(self, &mut out);
        out
    }
}

fn subst_under_binder(x: &Name, body: &Term, map: &BTreeMap<Name, Term>) -> (Name, Term) {
    let inner: BTreeMap<Name, Term> = map
        .iter()
        .filter(|(k, _)| *k != x && body.has_free(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if inner.is_empty() {
        return (x.clone(), body.clone());
    }
    let captures = inner.values().any(|v| v.has_free(x));
    if !captures {
        return (x.clone(), body.substitute_many(&inner));
    }
    let mut avoid = body.free_vars();
    for v in inner.values() {
        avoid.extend(v.free_vars());
    }
    avoid.extend(inner.keys().cloned());
    avoid.insert(x.clone());
    let fresh = fresh_name(x, &avoid);
    let mut renamed = inner;
    renamed.insert(x.clone(), Term::Var(fresh.clone()));
    (fresh, body.substitute_many(&renamed))
}

/// A variant of `base` not in `avoid`: `y` becomes `y'`, then `y'1`, `y'2`, ...
pub fn fresh_name(base: &str, avoid: &BTreeSet<Name>) -> Name {
    let stem = base.split('\'').next().unwrap_or(base);
    let first = name(&format!("{stem}'"));
    if !avoid.contains(&first) {
        return first;
    }
    (1..)
        .map(|i| name(&format!("{stem}'{i}")))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply of names")
}

fn alpha_eq_in(a: &Term, b: &Term, ea: &mut Vec<Name>, eb: &mut Vec<Name>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            let ix = ea.iter().rposition(|n| n == x);
            let iy = eb.iter().rposition(|n| n == y);
            match (ix, iy) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::Lam(x, s), Term::Lam(y, t)) => {
            ea.push(x.clone());
            eb.push(y.clone());
            let r = alpha_eq_in(s, t, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        (Term::Let(x, s1, b1), Term::Let(y, s2, b2)) => {
            if !alpha_eq_in(s1, s2, ea, eb) {
                return false;
            }
            ea.push(x.clone());
            eb.push(y.clone());
            let r = alpha_eq_in(b1, b2, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        (Term::App(f1, a1), Term::App(f2, a2)) => {
            alpha_eq_in(f1, f2, ea, eb) && alpha_eq_in(a1, a2, ea, eb)
        }
        (Term::Pure(s), Term::Pure(t)) => alpha_eq_in(s, t, ea, eb),
        (Term::Sym(f, xs), Term::Sym(g, ys)) => {
            f == g
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| alpha_eq_in(x, y, ea, eb))
        }
        _ => false,
    }
}

/// A path of child indices from the root. Children are numbered
/// `Lam`: body 0; `App`: function 0, argument 1; `Pure`: 0;
/// `Let`: subject 0, body 1; symbols: their arguments.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// Canonical single-space s-expression rendering; see `kernel::syntax`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Lam(x, b) => write!(f, "(lam {x} {b})"),
            Term::App(s, t) => write!(f, "(app {s} {t})"),
            Term::Pure(t) => write!(f, "(pure {t})"),
            Term::Let(x, s, b) => write!(f, "(let {x} {s} {b})"),
            Term::Sym(id, args) => {
                match id.kind {
                    SymbolKind::Effect => {
                        write!(f, "(eff {} (", id.name)?;
                        if let Some(p) = &id.param {
                            write!(f, "{p}")?;
                        }
                        write!(f, ")")?;
                    }
                    SymbolKind::Function => write!(f, "(fn {}", id.name)?,
                }
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
