//! Recursive path ordering with lexicographic status, rule certification
//! and precedence search.
//!
//! `s ≻ t` holds when `s = γ(s1..sm)` and one of
//!
//! 1. `t = γ(t1..tm)`, `(s1..sm) ≻lex (t1..tm)` and `s ≻ tj` for every `j`;
//! 2. `t = γ'(t1..tn)`, `γ > γ'` in the precedence and `s ≻ tj` for every `j`;
//! 3. `si ⪰ t` for some `i`.
//!
//! Variables head no case, so a variable is never greater than anything.

mod certify;
mod precedence;
mod search;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::kernel::{SymbolId, Term};

pub use certify::{certify_ruleset, mark_certified, CertReport, CertStatus, RuleCert};
pub use precedence::{Precedence, PrecedenceError};
pub use search::{search_precedence, SearchError, DEFAULT_SYMBOL_BOUND};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RpoError {
    #[error("not in the symbolic fragment: {0}")]
    NonSymbolic(Term),
    #[error("lexicographic comparison of sequences of length {0} and {1}")]
    LengthMismatch(usize, usize),
}

/// Which clause justifies a step of a derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RpoCase {
    #[serde(rename = "case-1-lex")]
    Lex,
    #[serde(rename = "case-2-precedence")]
    Precedence,
    #[serde(rename = "case-3-subterm")]
    Subterm,
    #[serde(rename = "refl-eq")]
    Refl,
}

impl RpoCase {
    pub fn label(self) -> &'static str {
        match self {
            RpoCase::Lex => "case-1-lex",
            RpoCase::Precedence => "case-2-precedence",
            RpoCase::Subterm => "case-3-subterm",
            RpoCase::Refl => "refl-eq",
        }
    }
}

impl fmt::Display for RpoCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Evidence for `lhs ≻ rhs` (or `lhs = rhs` for `Refl`).
///
/// Children by case:
/// - `Lex`: `i` `Refl` children for the equal prefix, the strict comparison
///   of the `i`-th arguments, then `lhs ≻ tj` for every rhs argument;
/// - `Precedence`: `lhs ≻ tj` for every rhs argument;
/// - `Subterm`: one child `si ⪰ rhs`;
/// - `Refl`: none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RpoDerivation {
    pub lhs: Term,
    pub rhs: Term,
    pub case: RpoCase,
    pub children: Vec<RpoDerivation>,
}

impl RpoDerivation {
    fn refl(t: &Term) -> Self {
        RpoDerivation { lhs: t.clone(), rhs: t.clone(), case: RpoCase::Refl, children: Vec::new() }
    }

    /// Checks every node against the three clauses.
    pub fn verify(&self, prec: &Precedence) -> bool {
        let strict = |d: &RpoDerivation| d.case != RpoCase::Refl;
        let ok_here = match self.case {
            RpoCase::Refl => self.lhs == self.rhs && self.children.is_empty(),
            RpoCase::Subterm => match (&self.lhs, self.children.as_slice()) {
                (Term::Sym(_, ss), [child]) => ss.contains(&child.lhs) && child.rhs == self.rhs,
                _ => false,
            },
            RpoCase::Lex => match (&self.lhs, &self.rhs) {
                (Term::Sym(f, ss), Term::Sym(g, ts)) if f == g && ss.len() == ts.len() => {
                    let i = self.children.iter().take_while(|c| c.case == RpoCase::Refl).count();
                    let n = ts.len();
                    i < n
                        && self.children.len() == i + 1 + n
                        && (0..i).all(|j| self.children[j].lhs == ss[j] && self.children[j].rhs == ts[j])
                        && strict(&self.children[i])
                        && self.children[i].lhs == ss[i]
                        && self.children[i].rhs == ts[i]
                        && ts.iter().zip(&self.children[i + 1..]).all(|(tj, c)| {
                            strict(c) && c.lhs == self.lhs && c.rhs == *tj
                        })
                }
                _ => false,
            },
            RpoCase::Precedence => match (&self.lhs, &self.rhs) {
                (Term::Sym(f, _), Term::Sym(g, ts)) => {
                    prec.greater(f, g)
                        && self.children.len() == ts.len()
                        && ts.iter().zip(&self.children).all(|(tj, c)| {
                            strict(c) && c.lhs == self.lhs && c.rhs == *tj
                        })
                }
                _ => false,
            },
        };
        ok_here && self.children.iter().all(|c| c.verify(prec))
    }

    /// Every case label used, in pre-order.
    pub fn cases(&self) -> Vec<RpoCase> {
        let mut out = vec![self.case];
        for c in &self.children {
            out.extend(c.cases());
        }
        out
    }

    pub fn uses(&self, case: RpoCase) -> bool {
        self.case == case || self.children.iter().any(|c| c.uses(case))
    }

    /// Indented text, one judgment per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(0, &mut out);
        out
    }

    fn write_text(&self, depth: usize, out: &mut String) {
        let rel = if self.case == RpoCase::Refl { "=" } else { "≻" };
        out.push_str(&format!(
            "{}{}: {} {} {}\n",
            "  ".repeat(depth),
            self.case,
            compact(&self.lhs),
            rel,
            compact(&self.rhs)
        ));
        for c in &self.children {
            c.write_text(depth + 1, out);
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "case": self.case.label(),
            "lhs": compact(&self.lhs),
            "rhs": compact(&self.rhs),
            "children": self.children.iter().map(RpoDerivation::to_json).collect::<Vec<_>>(),
        })
    }
}

/// First-order notation for symbolic terms: `or(or(s, t), u)`,
/// `assign[1](x)`. Other terms fall back to the s-expression form.
pub fn compact(t: &Term) -> String {
    match t {
        Term::Var(x) => x.to_string(),
        Term::Sym(id, args) => {
            let args: Vec<String> = args.iter().map(compact).collect();
            format!("{id}({})", args.join(", "))
        }
        Term::Pure(v) => format!("pure({})", compact(v)),
        other => other.to_string(),
    }
}

fn check_symbolic(t: &Term) -> Result<(), RpoError> {
    if t.is_symbolic() {
        Ok(())
    } else {
        Err(RpoError::NonSymbolic(t.clone()))
    }
}

/// A memoizing decision procedure for `≻` under one precedence.
///
/// Every case-2 comparison between distinct heads that the precedence does
/// not already order is recorded; precedence search extends the order with
/// these.
pub struct Rpo<'p> {
    prec: &'p Precedence,
    memo: HashMap<(Term, Term), bool>,
    wishes: BTreeSet<(SymbolId, SymbolId)>,
}

impl<'p> Rpo<'p> {
    pub fn new(prec: &'p Precedence) -> Self {
        Rpo { prec, memo: HashMap::new(), wishes: BTreeSet::new() }
    }

    pub fn precedence(&self) -> &Precedence {
        self.prec
    }

    /// Head pairs `(f, g)` whose ordering `f > g` was asked for but missing.
    pub fn wishes(&self) -> &BTreeSet<(SymbolId, SymbolId)> {
        &self.wishes
    }

    /// `s ≻ t`; both terms are assumed symbolic.
    pub fn greater(&mut self, s: &Term, t: &Term) -> bool {
        let key = (s.clone(), t.clone());
        if let Some(&b) = self.memo.get(&key) {
            return b;
        }
        let result = self.decide(s, t);
        self.memo.insert(key, result);
        result
    }

    pub fn geq(&mut self, s: &Term, t: &Term) -> bool {
        s == t || self.greater(s, t)
    }

    fn decide(&mut self, s: &Term, t: &Term) -> bool {
        let Term::Sym(f, ss) = s else {
            return false;
        };
        if ss.iter().any(|si| self.geq(si, t)) {
            return true;
        }
        let Term::Sym(g, ts) = t else {
            return false;
        };
        if f == g {
            ss.len() == ts.len() && self.lex(ss, ts) && ts.iter().all(|tj| self.greater(s, tj))
        } else if self.prec.greater(f, g) {
            ts.iter().all(|tj| self.greater(s, tj))
        } else {
            self.wishes.insert((f.clone(), g.clone()));
            false
        }
    }

    /// `ss ≻lex ts` for sequences of equal length.
    pub fn lex(&mut self, ss: &[Term], ts: &[Term]) -> bool {
        match ss.iter().zip(ts).position(|(a, b)| a != b) {
            Some(i) => self.greater(&ss[i], &ts[i]),
            None => false,
        }
    }

    /// Builds a derivation of `s ≻ t` when one exists. Clauses are tried
    /// in the order: subterm by equality, subterm by descent, lexicographic,
    /// precedence.
    pub fn derive(&mut self, s: &Term, t: &Term) -> Option<RpoDerivation> {
        if !self.greater(s, t) {
            return None;
        }
        let Term::Sym(f, ss) = s else {
            unreachable!("a variable is never greater")
        };
        let node = |case, children| RpoDerivation { lhs: s.clone(), rhs: t.clone(), case, children };
        if let Some(si) = ss.iter().find(|si| *si == t) {
            return Some(node(RpoCase::Subterm, vec![RpoDerivation::refl(si)]));
        }
        for si in ss {
            if self.greater(si, t) {
                let child = self.derive(si, t).expect("decided greater");
                return Some(node(RpoCase::Subterm, vec![child]));
            }
        }
        let Term::Sym(g, ts) = t else {
            unreachable!("only the subterm clause applies to a variable rhs")
        };
        let dominated: Option<Vec<RpoDerivation>> = ts.iter().map(|tj| self.derive(s, tj)).collect();
        let dominated = dominated.expect("clauses 1 and 2 need s ≻ tj for all j");
        if f == g && ss.len() == ts.len() && self.lex(ss, ts) {
            let i = ss.iter().zip(ts).position(|(a, b)| a != b).expect("lex found a difference");
            let mut children: Vec<RpoDerivation> = ss[..i].iter().map(RpoDerivation::refl).collect();
            children.push(self.derive(&ss[i], &ts[i]).expect("lex decided greater"));
            children.extend(dominated);
            return Some(node(RpoCase::Lex, children));
        }
        debug_assert!(self.prec.greater(f, g));
        Some(node(RpoCase::Precedence, dominated))
    }
}

/// `s ≻ t` under `prec`, with its derivation, or `None`.
pub fn rpo_greater(prec: &Precedence, s: &Term, t: &Term) -> Result<Option<RpoDerivation>, RpoError> {
    check_symbolic(s)?;
    check_symbolic(t)?;
    Ok(Rpo::new(prec).derive(s, t))
}

/// `s ⪰ t`: syntactic equality or `s ≻ t`.
pub fn rpo_geq(prec: &Precedence, s: &Term, t: &Term) -> Result<Option<RpoDerivation>, RpoError> {
    check_symbolic(s)?;
    check_symbolic(t)?;
    if s == t {
        return Ok(Some(RpoDerivation::refl(s)));
    }
    Ok(Rpo::new(prec).derive(s, t))
}

/// Lexicographic extension of `≻` to equal-length sequences.
pub fn lex_greater(prec: &Precedence, ss: &[Term], ts: &[Term]) -> Result<bool, RpoError> {
    if ss.len() != ts.len() {
        return Err(RpoError::LengthMismatch(ss.len(), ts.len()));
    }
    for t in ss.iter().chain(ts) {
        check_symbolic(t)?;
    }
    Ok(Rpo::new(prec).lex(ss, ts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    fn or(a: Term, b: Term) -> Term {
        Term::eff("or", vec![a, b])
    }

    fn assign(i: &str, t: Term) -> Term {
        Term::eff_with("assign", i, vec![t])
    }

    #[test]
    fn or_rule_descends_by_lex() {
        let prec = Precedence::empty();
        let d = rpo_greater(&prec, &or(or(v("s"), v("t")), v("u")), &or(v("s"), or(v("t"), v("u"))))
            .unwrap()
            .unwrap();
        assert_eq!(d.case, RpoCase::Lex);
        // first lex component: or(s, t) ≻ s by the subterm clause
        assert_eq!(d.children[0].case, RpoCase::Subterm);
        assert_eq!(d.children[0].lhs, or(v("s"), v("t")));
        assert_eq!(d.children[0].rhs, v("s"));
        assert!(d.verify(&prec));
    }

    #[test]
    fn assign_assign_is_immediate_subterm() {
        let prec = Precedence::empty();
        let s = assign("1", assign("2", v("s")));
        let d = rpo_greater(&prec, &s, &assign("2", v("s"))).unwrap().unwrap();
        assert_eq!(d.case, RpoCase::Subterm);
        assert_eq!(d.children[0].case, RpoCase::Refl);
    }

    #[test]
    fn irreflexive_and_variables() {
        let prec = Precedence::empty();
        let s = or(v("a"), v("b"));
        assert!(rpo_greater(&prec, &s, &s).unwrap().is_none());
        assert!(rpo_greater(&prec, &v("x"), &s).unwrap().is_none());
        assert!(rpo_greater(&prec, &s, &v("a")).unwrap().is_some());
        assert!(rpo_greater(&prec, &s, &v("c")).unwrap().is_none());
    }

    #[test]
    fn geq_cases() {
        let prec = Precedence::empty();
        assert_eq!(rpo_geq(&prec, &v("x"), &v("x")).unwrap().unwrap().case, RpoCase::Refl);
        let ab = or(v("a"), v("b"));
        assert_eq!(rpo_geq(&prec, &ab, &v("a")).unwrap().unwrap().case, RpoCase::Subterm);
        assert!(rpo_geq(&prec, &v("a"), &ab).unwrap().is_none());
    }

    #[test]
    fn lex_examples() {
        let prec = Precedence::empty();
        let succ = |t| Term::eff("succ", vec![t]);
        assert!(lex_greater(&prec, &[or(v("s"), v("t")), v("u")], &[v("s"), v("w")]).unwrap());
        assert!(!lex_greater(&prec, &[v("a"), v("b")], &[v("a"), v("b")]).unwrap());
        assert!(lex_greater(&prec, &[succ(v("u")), v("r")], &[v("u"), v("r2")]).unwrap());
        assert_eq!(lex_greater(&prec, &[v("a")], &[]), Err(RpoError::LengthMismatch(1, 0)));
    }

    #[test]
    fn non_symbolic_input_is_rejected() {
        let prec = Precedence::empty();
        let bad = Term::pure(v("x"));
        assert!(matches!(rpo_greater(&prec, &bad, &v("x")), Err(RpoError::NonSymbolic(_))));
    }

    #[test]
    fn precedence_enables_case_two() {
        let f = |t| Term::eff("f", vec![t]);
        let g = |t| Term::eff("g", vec![t]);
        let lhs = f(v("x"));
        let rhs = g(g(v("x")));
        assert!(rpo_greater(&Precedence::empty(), &lhs, &rhs).unwrap().is_none());
        let prec = Precedence::from_pairs([(SymbolId::effect("f"), SymbolId::effect("g"))]).unwrap();
        let d = rpo_greater(&prec, &lhs, &rhs).unwrap().unwrap();
        assert_eq!(d.case, RpoCase::Precedence);
        assert!(d.verify(&prec));
        // the same derivation does not replay without the precedence
        assert!(!d.verify(&Precedence::empty()));
    }

    #[test]
    fn tampered_derivations_fail_replay() {
        let prec = Precedence::empty();
        let mut d = rpo_greater(&prec, &or(or(v("s"), v("t")), v("u")), &or(v("s"), or(v("t"), v("u"))))
            .unwrap()
            .unwrap();
        d.children.pop();
        assert!(!d.verify(&prec));
        let fake = RpoDerivation { lhs: v("x"), rhs: v("y"), case: RpoCase::Refl, children: vec![] };
        assert!(!fake.verify(&prec));
    }
}
