//! Shared generators and independent oracles for the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use effect_rewrite::kernel::{
    has_type, infer_open, name, Arity, Name, Signature, SymbolId, SymbolKind, Term, Type,
    TypingContext,
};
use effect_rewrite::rpo::Precedence;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn v(x: &str) -> Term {
    Term::var(x)
}

pub fn p(x: &str) -> Term {
    Term::pure(Term::var(x))
}

pub fn or(a: Term, b: Term) -> Term {
    Term::eff("or", vec![a, b])
}

// Random composition of n into k positive parts.
fn split(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    if k == 0 {
        return Vec::new();
    }
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain([n]) {
        parts.push(c - prev);
        prev = c;
    }
    parts
}

// As `split`, with every part at least `min`; needs `n >= k * min`.
fn split_min(rng: &mut ChaCha8Rng, n: usize, k: usize, min: usize) -> Vec<usize> {
    split(rng, n - k * (min - 1), k).into_iter().map(|p| p + min - 1).collect()
}

/// Random well-typed computations `E(T)` over a theory signature, where `T`
/// is the theory's value type: the base type of its value functions if
/// it has any, otherwise the type of the free variables `a`, `b`, `c`.
pub struct TermGen<'a> {
    pub sig: &'a Signature,
    effects: Vec<(SymbolId, usize)>,
    value_fns: Vec<(SymbolId, usize)>,
    free: Vec<Name>,
    counter: usize,
}

impl<'a> TermGen<'a> {
    pub fn new(sig: &'a Signature) -> Self {
        let mut effects = Vec::new();
        let mut value_fns = Vec::new();
        let mut value_type: Option<Type> = None;
        for d in sig.decls() {
            match &d.arity {
                Arity::Effect(n) => effects.extend(d.identities().into_iter().map(|id| (id, *n))),
                Arity::Function { params, result } => {
                    let vt = value_type.get_or_insert_with(|| result.clone()).clone();
                    if *result == vt && params.iter().all(|p| *p == vt) {
                        value_fns.push((SymbolId::function(&d.name), params.len()));
                    }
                }
            }
        }
        TermGen { sig, effects, value_fns, free: ["a", "b", "c"].map(name).to_vec(), counter: 0 }
    }

    fn fresh(&mut self) -> Name {
        self.counter += 1;
        name(&format!("x{}", self.counter))
    }

    /// A value of the value type, of at most `size` nodes.
    pub fn value(&mut self, rng: &mut ChaCha8Rng, size: usize, scope: &[Name]) -> Term {
        let usable: Vec<&(SymbolId, usize)> =
            self.value_fns.iter().filter(|(_, n)| *n < size.max(1)).collect();
        let leaf_fns: Vec<&(SymbolId, usize)> = self.value_fns.iter().filter(|(_, n)| *n == 0).collect();
        if size > 1 && !usable.is_empty() && rng.gen_bool(0.6) {
            let (f, n) = (*usable.choose(rng).unwrap()).clone();
            let args = split(rng, size - 1, n).into_iter().map(|k| self.value(rng, k, scope)).collect();
            return Term::Sym(f, args);
        }
        if !leaf_fns.is_empty() && rng.gen_bool(0.3) {
            return Term::Sym(leaf_fns.choose(rng).unwrap().0.clone(), vec![]);
        }
        if !scope.is_empty() && rng.gen_bool(0.6) {
            return Term::Var(scope.choose(rng).unwrap().clone());
        }
        // without value functions the free variables must share one type,
        // which they do since every leaf is a value of the same type
        Term::Var(self.free.choose(rng).unwrap().clone())
    }

    /// A computation of at most `max(size, 2)` nodes.
    pub fn comp(&mut self, rng: &mut ChaCha8Rng, size: usize, scope: &mut Vec<Name>) -> Term {
        if size <= 2 {
            return Term::pure(self.value(rng, 1, scope));
        }
        match rng.gen_range(0..10) {
            0..=3 if !self.effects.is_empty() => {
                let (e, n) = self.effects.choose(rng).unwrap().clone();
                if 2 * n + 1 > size {
                    return Term::pure(self.value(rng, size - 1, scope));
                }
                let args =
                    split_min(rng, size - 1, n, 2).into_iter().map(|k| self.comp(rng, k, scope)).collect();
                Term::Sym(e, args)
            }
            4..=6 if size >= 5 => {
                let x = self.fresh();
                let parts = split_min(rng, size - 1, 2, 2);
                let subject = self.comp(rng, parts[0], scope);
                scope.push(x.clone());
                let body = self.comp(rng, parts[1], scope);
                scope.pop();
                Term::Let(x, Box::new(subject), Box::new(body))
            }
            7..=8 if size >= 5 => {
                let x = self.fresh();
                let body_size = rng.gen_range(2..=size - 3);
                let parts = [body_size, size - 2 - body_size];
                scope.push(x.clone());
                let body = self.comp(rng, parts[0], scope);
                scope.pop();
                let arg = self.value(rng, parts[1], scope);
                Term::app(Term::Lam(x, Box::new(body)), arg)
            }
            _ => Term::pure(self.value(rng, size - 1, scope)),
        }
    }

    pub fn term(&mut self, rng: &mut ChaCha8Rng, max_size: usize) -> Term {
        let size = rng.gen_range(2..=max_size.max(2));
        self.comp(rng, size, &mut Vec::new())
    }
}

/// Random or-tree with `leaves` pure leaves `pure(l0) .. pure(l{n-1})` in order.
pub fn or_tree(rng: &mut ChaCha8Rng, leaves: usize) -> Term {
    fn go(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Term {
        if hi - lo == 1 {
            return p(&format!("l{lo}"));
        }
        let mid = rng.gen_range(lo + 1..hi);
        or(go(rng, lo, mid), go(rng, mid, hi))
    }
    go(rng, 0, leaves)
}

/// In-order leaves of an or-tree.
pub fn or_leaves(t: &Term) -> Vec<Term> {
    match t {
        Term::Sym(id, args) if &*id.name == "or" => args.iter().flat_map(or_leaves).collect(),
        other => vec![other.clone()],
    }
}

pub fn count_symbol(t: &Term, sym: &str) -> usize {
    let here = matches!(t, Term::Sym(id, _) if &*id.name == sym) as usize;
    here + t.children().into_iter().map(|c| count_symbol(c, sym)).sum::<usize>()
}

pub fn right_nested(t: &Term) -> bool {
    match t {
        Term::Sym(id, args) if &*id.name == "or" => {
            !matches!(&args[0], Term::Sym(f, _) if &*f.name == "or") && args.iter().all(right_nested)
        }
        _ => true,
    }
}

/// Random assign-rooted ground trace over a value domain, with pure leaves.
pub fn assign_trace(rng: &mut ChaCha8Rng, domain: &[&str], depth: usize) -> Term {
    fn node(rng: &mut ChaCha8Rng, domain: &[&str], depth: usize) -> Term {
        if depth == 0 || rng.gen_bool(0.2) {
            return p(&format!("r{}", rng.gen_range(0..3)));
        }
        if rng.gen_bool(0.5) {
            let i = domain.choose(rng).unwrap();
            Term::eff_with("assign", i, vec![node(rng, domain, depth - 1)])
        } else {
            Term::eff("get", domain.iter().map(|_| node(rng, domain, depth - 1)).collect())
        }
    }
    let i = domain.choose(rng).unwrap();
    Term::eff_with("assign", i, vec![node(rng, domain, depth - 1)])
}

/// The adjacency invariants of global-state normal forms: no get under
/// get, no assign under assign, no get under assign.
pub fn state_adjacency_ok(t: &Term) -> bool {
    let is = |t: &Term, n: &str| matches!(t, Term::Sym(id, _) if &*id.name == n);
    let here = match t {
        Term::Sym(id, args) if &*id.name == "get" => !args.iter().any(|a| is(a, "get")),
        Term::Sym(id, args) if &*id.name == "assign" => !args.iter().any(|a| is(a, "get") || is(a, "assign")),
        _ => true,
    };
    here && t.children().into_iter().all(state_adjacency_ok)
}

/// A small first-order signature for RPO properties: `f/2`, `g/1`, `h/0`
/// and variables `x`, `y`, `z`.
pub const RPO_SYMBOLS: [(&str, usize); 4] = [("f", 2), ("g", 1), ("h", 0), ("k", 2)];

pub fn symbolic(rng: &mut ChaCha8Rng, depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.7) {
            v(["x", "y", "z"].choose(rng).unwrap())
        } else {
            Term::eff("h", vec![])
        };
    }
    let (f, n) = RPO_SYMBOLS.choose(rng).unwrap();
    Term::eff(f, (0..*n).map(|_| symbolic(rng, depth - 1)).collect())
}

pub fn ground_symbolic(rng: &mut ChaCha8Rng, depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.3) {
        return Term::eff("h", vec![]);
    }
    let (f, n) = RPO_SYMBOLS.choose(rng).unwrap();
    Term::eff(f, (0..*n).map(|_| ground_symbolic(rng, depth - 1)).collect())
}

/// A random strict order on the RPO test symbols, from a random ranking.
pub fn random_precedence(rng: &mut ChaCha8Rng) -> Precedence {
    let mut names: Vec<&str> = RPO_SYMBOLS.iter().map(|(n, _)| *n).collect();
    names.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            if rng.gen_bool(0.5) {
                pairs.push((SymbolId::effect(names[i]), SymbolId::effect(names[j])));
            }
        }
    }
    Precedence::from_pairs(pairs).expect("ranking is acyclic")
}

/// The ordering, straight from its definition: no memo, no derivations.
pub fn naive_rpo(prec: &Precedence, s: &Term, t: &Term) -> bool {
    let Term::Sym(f, ss) = s else { return false };
    if ss.iter().any(|si| si == t || naive_rpo(prec, si, t)) {
        return true;
    }
    let Term::Sym(g, ts) = t else { return false };
    let dominates = ts.iter().all(|tj| naive_rpo(prec, s, tj));
    if f == g && ss.len() == ts.len() {
        let lex = match ss.iter().zip(ts.iter()).find(|(a, b)| a != b) {
            Some((a, b)) => naive_rpo(prec, a, b),
            None => false,
        };
        if lex && dominates {
            return true;
        }
    }
    prec.greater(f, g) && dominates
}

/// Proper subterms in the symbolic fragment.
pub fn proper_subterms(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    for c in t.children() {
        out.push(c.clone());
        out.extend(proper_subterms(c));
    }
    out
}

fn skolemize_type(t: &Type) -> Type {
    match t {
        Type::Var(v) => Type::base(&format!("?{v}")),
        Type::Base(_) => t.clone(),
        Type::Eff(i) => Type::eff(skolemize_type(i)),
        Type::Arrow(a, b) => Type::arrow(skolemize_type(a), skolemize_type(b)),
    }
}

/// Subject reduction for one step: under the typing inferred for `before`,
/// with its type variables held rigid, `after` has the same type.
pub fn preserves_type(sig: &Signature, before: &Term, after: &Term) -> bool {
    let Ok((ctx, ty)) = infer_open(before, sig) else { return false };
    let mut rigid = TypingContext::new();
    for (x, tx) in ctx.entries() {
        rigid.push(x.clone(), skolemize_type(tx));
    }
    // free variables lost by the step are harmless; new ones are not
    after.free_vars().iter().all(|x| rigid.lookup(x).is_some())
        && has_type(&rigid, after, sig, &skolemize_type(&ty))
}

/// `S^n(Z)` in the peano theory.
pub fn numeral(n: usize) -> Term {
    (0..n).fold(Term::func("Z", vec![]), |acc, _| Term::func("S", vec![acc]))
}

/// Occurrences of each symbol identity.
pub fn symbol_counts(t: &Term) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    fn go(t: &Term, out: &mut BTreeMap<String, usize>) {
        if let Term::Sym(id, _) = t {
            *out.entry(id.to_string()).or_default() += 1;
        }
        for c in t.children() {
            go(c, out);
        }
    }
    go(t, &mut out);
    out
}

pub fn is_effect(t: &Term) -> bool {
    matches!(t, Term::Sym(id, _) if id.kind == SymbolKind::Effect)
}
