use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::term::{name, Name, SymbolId, SymbolKind};

/// Types of the metalanguage. `Var` only arises from inference: lambda
/// binders are unannotated and effect symbols are polymorphic in the result
/// type of their continuations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Base(Name),
    /// `E(T)`: computations returning `T`.
    Eff(Box<Type>),
    Arrow(Box<Type>, Box<Type>),
    Var(u32),
}

impl Type {
    pub fn base(n: &str) -> Type {
        Type::Base(name(n))
    }

    pub fn eff(t: Type) -> Type {
        Type::Eff(Box::new(t))
    }

    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Type::Base(_) => true,
            Type::Var(_) => false,
            Type::Eff(t) => t.is_ground(),
            Type::Arrow(a, b) => a.is_ground() && b.is_ground(),
        }
    }

    pub fn vars(&self, out: &mut Vec<u32>) {
        match self {
            Type::Base(_) => {}
            Type::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Type::Eff(t) => t.vars(out),
            Type::Arrow(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    /// One-way matching: true if some instantiation of the variables of
    /// `self` yields `other`.
    pub fn generalizes(&self, other: &Type) -> bool {
        fn go(pat: &Type, t: &Type, sub: &mut HashMap<u32, Type>) -> bool {
            match (pat, t) {
                (Type::Var(v), _) => match sub.get(v) {
                    Some(bound) => bound == t,
                    None => {
                        sub.insert(*v, t.clone());
                        true
                    }
                },
                (Type::Base(a), Type::Base(b)) => a == b,
                (Type::Eff(a), Type::Eff(b)) => go(a, b, sub),
                (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => go(a1, a2, sub) && go(b1, b2, sub),
                _ => false,
            }
        }
        go(self, other, &mut HashMap::new())
    }

    /// Equality up to a bijective renaming of type variables.
    pub fn equiv(&self, other: &Type) -> bool {
        equiv_all(std::slice::from_ref(self), std::slice::from_ref(other))
    }

    fn rename(&self, map: &HashMap<u32, u32>) -> Type {
        match self {
            Type::Var(v) => Type::Var(*map.get(v).unwrap_or(v)),
            Type::Base(_) => self.clone(),
            Type::Eff(t) => Type::eff(t.rename(map)),
            Type::Arrow(a, b) => Type::arrow(a.rename(map), b.rename(map)),
        }
    }
}

/// Pointwise equality of two type lists up to one shared bijective renaming.
pub fn equiv_all(a: &[Type], b: &[Type]) -> bool {
    fn go(x: &Type, y: &Type, fwd: &mut HashMap<u32, u32>, back: &mut HashMap<u32, u32>) -> bool {
        match (x, y) {
            (Type::Var(u), Type::Var(v)) => {
                let f = *fwd.entry(*u).or_insert(*v);
                let g = *back.entry(*v).or_insert(*u);
                f == *v && g == *u
            }
            (Type::Base(p), Type::Base(q)) => p == q,
            (Type::Eff(p), Type::Eff(q)) => go(p, q, fwd, back),
            (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => {
                go(a1, a2, fwd, back) && go(b1, b2, fwd, back)
            }
            _ => false,
        }
    }
    let (mut fwd, mut back) = (HashMap::new(), HashMap::new());
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| go(x, y, &mut fwd, &mut back))
}

/// Renumbers the variables of `types` jointly as 0, 1, ... in order of
/// first appearance, so printed types read `'a`, `'b`, ...
pub fn tidy_vars(types: &mut [Type]) {
    let mut seen = Vec::new();
    for t in types.iter() {
        t.vars(&mut seen);
    }
    let map: HashMap<u32, u32> = seen.iter().enumerate().map(|(i, v)| (*v, i as u32)).collect();
    for t in types.iter_mut() {
        *t = t.rename(&map);
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Base(b) => write!(f, "{b}"),
            Type::Eff(t) => write!(f, "(E {t})"),
            Type::Arrow(a, b) => write!(f, "(-> {a} {b})"),
            Type::Var(v) if *v < 26 => write!(f, "'{}", (b'a' + *v as u8) as char),
            Type::Var(v) => write!(f, "'t{v}"),
        }
    }
}

/// A finite enumeration of effect parameter values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub name: Name,
    pub values: Vec<Name>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arity {
    /// `e(t1, ..., tn) : E(T)` whenever every `ti : E(T)`.
    Effect(usize),
    /// `f : S1 × ... × Sn → T`.
    Function { params: Vec<Type>, result: Type },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolDecl {
    pub name: Name,
    pub domain: Option<Domain>,
    pub arity: Arity,
}

impl SymbolDecl {
    pub fn effect(n: &str, arity: usize) -> Self {
        SymbolDecl { name: name(n), domain: None, arity: Arity::Effect(arity) }
    }

    pub fn param_effect(n: &str, domain: Domain, arity: usize) -> Self {
        SymbolDecl { name: name(n), domain: Some(domain), arity: Arity::Effect(arity) }
    }

    pub fn function(n: &str, params: Vec<Type>, result: Type) -> Self {
        SymbolDecl { name: name(n), domain: None, arity: Arity::Function { params, result } }
    }

    pub fn kind(&self) -> SymbolKind {
        match self.arity {
            Arity::Effect(_) => SymbolKind::Effect,
            Arity::Function { .. } => SymbolKind::Function,
        }
    }

    pub fn arg_count(&self) -> usize {
        match &self.arity {
            Arity::Effect(n) => *n,
            Arity::Function { params, .. } => params.len(),
        }
    }

    /// Every identity of this symbol, one per parameter value.
    pub fn identities(&self) -> Vec<SymbolId> {
        let kind = self.kind();
        match &self.domain {
            None => vec![SymbolId { name: self.name.clone(), param: None, kind }],
            Some(d) => d
                .values
                .iter()
                .map(|p| SymbolId { name: self.name.clone(), param: Some(p.clone()), kind })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("symbol `{0}` declared twice")]
    Duplicate(Name),
    #[error("unknown symbol `{0}`")]
    Unknown(Name),
    #[error("symbol `{symbol}` expects {expected} argument(s), found {found}")]
    Arity { symbol: Name, expected: usize, found: usize },
    #[error("symbol `{symbol}` {problem}")]
    Param { symbol: Name, problem: String },
}

/// The signature: every rewritable symbol with its kind and arity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<Name, SymbolDecl>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Names are unique across kinds and arities.
    pub fn declare(&mut self, decl: SymbolDecl) -> Result<(), SignatureError> {
        if self.symbols.contains_key(&decl.name) {
            return Err(SignatureError::Duplicate(decl.name));
        }
        self.symbols.insert(decl.name.clone(), decl);
        Ok(())
    }

    pub fn get(&self, n: &str) -> Option<&SymbolDecl> {
        self.symbols.get(n)
    }

    pub fn decls(&self) -> impl Iterator<Item = &SymbolDecl> {
        self.symbols.values()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// All symbol identities, parameter instances expanded.
    pub fn identities(&self) -> Vec<SymbolId> {
        self.symbols.values().flat_map(SymbolDecl::identities).collect()
    }

    /// Resolves a symbol occurrence to its identity, checking the parameter
    /// against the declared domain and the argument count against the arity.
    pub fn resolve(
        &self,
        n: &str,
        params: &[&str],
        arg_count: usize,
    ) -> Result<SymbolId, SignatureError> {
        let decl = self.get(n).ok_or_else(|| SignatureError::Unknown(name(n)))?;
        let param = match (&decl.domain, params) {
            (None, []) => None,
            (None, _) => {
                return Err(SignatureError::Param {
                    symbol: decl.name.clone(),
                    problem: "takes no parameters".into(),
                })
            }
            (Some(d), [p]) => match d.values.iter().find(|v| &***v == *p) {
                Some(v) => Some(v.clone()),
                None => {
                    return Err(SignatureError::Param {
                        symbol: decl.name.clone(),
                        problem: format!("parameter `{p}` is not in domain `{}`", d.name),
                    })
                }
            },
            (Some(d), _) => {
                return Err(SignatureError::Param {
                    symbol: decl.name.clone(),
                    problem: format!("takes exactly one parameter from domain `{}`", d.name),
                })
            }
        };
        if arg_count != decl.arg_count() {
            return Err(SignatureError::Arity {
                symbol: decl.name.clone(),
                expected: decl.arg_count(),
                found: arg_count,
            });
        }
        Ok(SymbolId { name: decl.name.clone(), param, kind: decl.kind() })
    }
}

/// Γ: an ordered list of bindings; later bindings shadow earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypingContext {
    entries: Vec<(Name, Type)>,
}

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, x: &str, ty: Type) -> Self {
        self.push(name(x), ty);
        self
    }

    pub fn push(&mut self, x: Name, ty: Type) {
        self.entries.push((x, ty));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn lookup(&self, x: &str) -> Option<&Type> {
        self.entries.iter().rev().find(|(n, _)| &**n == x).map(|(_, t)| t)
    }

    pub fn entries(&self) -> &[(Name, Type)] {
        &self.entries
    }
}
