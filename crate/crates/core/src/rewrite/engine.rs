use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::kernel::{fresh_name, Position, Term};

use super::rule::RewriteRule;

/// The four rules of the metalanguage itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MlRule {
    /// `(λx. u) t ~> u{t/x}`
    AbsBeta,
    /// `let x <= pure(t) in u ~> u{t/x}`
    LetBeta,
    /// `let y <= (let x <= t1 in t2) in u ~> let x <= t1 in let y <= t2 in u`
    LetAssoc,
    /// `let x <= e(t1..tn) in u ~> e(let x <= t1 in u, ..., let x <= tn in u)`
    EffAssoc,
}

impl MlRule {
    pub const ALL: [MlRule; 4] = [MlRule::AbsBeta, MlRule::LetBeta, MlRule::LetAssoc, MlRule::EffAssoc];

    pub fn name(self) -> &'static str {
        match self {
            MlRule::AbsBeta => "abs-β",
            MlRule::LetBeta => "let-β",
            MlRule::LetAssoc => "let-assoc",
            MlRule::EffAssoc => "eff-assoc",
        }
    }

    /// Contracts `t` at its root, if this rule applies there.
    pub fn contract(self, t: &Term) -> Option<Term> {
        match (self, t) {
            (MlRule::AbsBeta, Term::App(f, arg)) => match &**f {
                Term::Lam(x, body) => Some(body.substitute(x, arg)),
                _ => None,
            },
            (MlRule::LetBeta, Term::Let(x, subject, body)) => match &**subject {
                Term::Pure(v) => Some(body.substitute(x, v)),
                _ => None,
            },
            (MlRule::LetAssoc, Term::Let(y, subject, u)) => match &**subject {
                Term::Let(x, t1, t2) => {
                    // side condition x ∉ FV(u): rename the inner binder if needed
                    let (x, t2) = if u.has_free(x) {
                        let mut avoid = t2.free_vars();
                        avoid.extend(u.free_vars());
                        avoid.insert(y.clone());
                        let fresh = fresh_name(x, &avoid);
                        let t2 = t2.substitute(x, &Term::Var(fresh.clone()));
                        (fresh, t2)
                    } else {
                        (x.clone(), (**t2).clone())
                    };
                    let inner = Term::Let(y.clone(), Box::new(t2), u.clone());
                    Some(Term::Let(x, t1.clone(), Box::new(inner)))
                }
                _ => None,
            },
            (MlRule::EffAssoc, Term::Let(x, subject, u)) => match &**subject {
                Term::Sym(id, args) if id.is_effect() => Some(Term::Sym(
                    id.clone(),
                    args.iter()
                        .map(|a| Term::Let(x.clone(), Box::new(a.clone()), u.clone()))
                        .collect(),
                )),
                _ => None,
            },
            _ => None,
        }
    }
}

/// Which rule produced a redex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleRef {
    Ml(MlRule),
    /// Index into the rule list the redex was computed against.
    Symbolic(usize),
}

/// A reducible site in a term, with the one-step result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Redex {
    pub position: Position,
    pub rule: RuleRef,
    pub rule_name: String,
    /// The subterm at `position` before contraction.
    pub redex: Term,
    /// Its replacement.
    pub contractum: Term,
    /// The whole term after the step.
    pub reduct: Term,
}

/// A redex located but not yet plugged back into the whole term.
#[derive(Debug, Clone)]
pub(crate) struct Site {
    pub position: Position,
    pub rule: RuleRef,
    pub contractum: Term,
}

impl Site {
    pub fn into_redex(self, whole: &Term, rules: &[RewriteRule]) -> Redex {
        let redex = whole.subterm_at(&self.position).expect("site position valid").clone();
        let reduct = whole.replace_at(&self.position, self.contractum.clone()).expect("site position valid");
        Redex {
            rule_name: rule_name(self.rule, rules),
            position: self.position,
            rule: self.rule,
            redex,
            contractum: self.contractum,
            reduct,
        }
    }
}

fn rule_name(r: RuleRef, rules: &[RewriteRule]) -> String {
    match r {
        RuleRef::Ml(m) => m.name().to_string(),
        RuleRef::Symbolic(i) => rules[i].name.clone(),
    }
}

/// All sites in pre-order; at one position, metalanguage rules come first,
/// then symbolic rules in list order. This is leftmost-outermost order.
pub(crate) fn sites(t: &Term, rules: &[RewriteRule], ml: bool, symbolic: bool) -> Vec<Site> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect_sites(t, rules, ml, symbolic, &mut path, &mut out);
    out
}

fn collect_sites(
    t: &Term,
    rules: &[RewriteRule],
    ml: bool,
    symbolic: bool,
    path: &mut Vec<usize>,
    out: &mut Vec<Site>,
) {
    if ml && matches!(t, Term::App(..) | Term::Let(..)) {
        for m in MlRule::ALL {
            if let Some(c) = m.contract(t) {
                out.push(Site { position: Position(path.clone()), rule: RuleRef::Ml(m), contractum: c });
            }
        }
    }
    if symbolic && matches!(t, Term::Sym(..)) {
        for (i, r) in rules.iter().enumerate() {
            if let Some(c) = r.apply(t) {
                out.push(Site { position: Position(path.clone()), rule: RuleRef::Symbolic(i), contractum: c });
            }
        }
    }
    for (i, c) in t.children().into_iter().enumerate() {
        path.push(i);
        collect_sites(c, rules, ml, symbolic, path, out);
        path.pop();
    }
}

/// Every metalanguage redex of `t`, in any context.
pub fn ml_redexes(t: &Term) -> Vec<Redex> {
    sites(t, &[], true, false).into_iter().map(|s| s.into_redex(t, &[])).collect()
}

/// Every position/rule pair where a symbolic rule matches.
pub fn symbolic_redexes(t: &Term, rules: &[RewriteRule]) -> Vec<Redex> {
    sites(t, rules, false, true).into_iter().map(|s| s.into_redex(t, rules)).collect()
}

/// Metalanguage and symbolic redexes together, leftmost-outermost first.
pub fn redexes(t: &Term, rules: &[RewriteRule]) -> Vec<Redex> {
    sites(t, rules, true, true).into_iter().map(|s| s.into_redex(t, rules)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("stale redex: the term has no `{rule}` redex at {position}")]
    StaleRedex { position: Position, rule: String },
}

/// Performs the step described by `r` on `t`. The redex must still be
/// present at its position.
pub fn step(t: &Term, r: &Redex) -> Result<Term, RewriteError> {
    match t.subterm_at(&r.position) {
        Some(sub) if *sub == r.redex => Ok(t
            .replace_at(&r.position, r.contractum.clone())
            .expect("position checked above")),
        _ => Err(RewriteError::StaleRedex { position: r.position.clone(), rule: r.rule_name.clone() }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    LeftmostOutermost,
    RightmostInnermost,
    /// Uniform choice among all redexes, from a seeded ChaCha stream.
    Random(u64),
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::LeftmostOutermost => write!(f, "leftmost-outermost"),
            Strategy::RightmostInnermost => write!(f, "rightmost-innermost"),
            Strategy::Random(seed) => write!(f, "random({seed})"),
        }
    }
}

pub const DEFAULT_NORMALIZE_FUEL: usize = 10_000;

/// A reduction sequence. Each step's redex was computed against the
/// previous term; its `reduct` is the next term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: Term,
    pub steps: Vec<Redex>,
}

impl Trace {
    pub fn new(initial: Term) -> Self {
        Trace { initial, steps: Vec::new() }
    }

    pub fn last(&self) -> &Term {
        self.steps.last().map_or(&self.initial, |r| &r.reduct)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Every term along the trace, starting with the initial one.
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|r| &r.reduct))
    }

    /// Replays every step from the initial term.
    pub fn is_consistent(&self) -> bool {
        let mut cur = self.initial.clone();
        for r in &self.steps {
            match step(&cur, r) {
                Ok(next) if next == r.reduct => cur = next,
                _ => return false,
            }
        }
        true
    }

    /// One line per step: `<rule-name> @ <position-path> : <printed reduct>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.steps {
            out.push_str(&format!("{} @ {} : {}\n", r.rule_name, r.position, r.reduct));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct StepView {
            rule: String,
            position: Vec<usize>,
            reduct: String,
        }
        let steps: Vec<StepView> = self
            .steps
            .iter()
            .map(|r| StepView {
                rule: r.rule_name.clone(),
                position: r.position.0.clone(),
                reduct: r.reduct.to_string(),
            })
            .collect();
        serde_json::json!({ "initial": self.initial.to_string(), "steps": steps })
    }
}

/// Raised when normalization runs out of fuel; carries the partial trace.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("fuel exhausted after {} step(s)", trace.len())]
pub struct FuelExhausted {
    pub term: Term,
    pub trace: Trace,
}

fn choose(sites: Vec<Site>, strategy: Strategy, rng: &mut Option<ChaCha8Rng>) -> Site {
    match strategy {
        Strategy::LeftmostOutermost => sites.into_iter().next().expect("non-empty"),
        Strategy::RightmostInnermost => {
            // the lexicographically greatest position is innermost and
            // rightmost; at that position the earliest rule wins
            let max = sites.iter().map(|s| &s.position).max().expect("non-empty").clone();
            sites.into_iter().find(|s| s.position == max).expect("present")
        }
        Strategy::Random(_) => {
            let rng = rng.as_mut().expect("rng seeded for random strategy");
            let i = rng.gen_range(0..sites.len());
            sites.into_iter().nth(i).expect("in range")
        }
    }
}

/// Rewrites `t` with the metalanguage rules and `rules` until no redex is
/// left, or `fuel` steps have been taken with redexes remaining.
pub fn normalize(
    t: &Term,
    rules: &[RewriteRule],
    strategy: Strategy,
    fuel: usize,
) -> Result<(Term, Trace), FuelExhausted> {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut trace = Trace::new(t.clone());
    let mut cur = t.clone();
    loop {
        let found = sites(&cur, rules, true, true);
        if found.is_empty() {
            return Ok((cur, trace));
        }
        if trace.len() >= fuel {
            return Err(FuelExhausted { term: cur, trace });
        }
        let redex = choose(found, strategy, &mut rng).into_redex(&cur, rules);
        cur = redex.reduct.clone();
        trace.steps.push(redex);
    }
}

/// Number of `let` nodes lying inside the subject of an enclosing `let`.
/// A let-assoc step strictly decreases it on the rewritten subterm.
pub fn left_nesting_measure(t: &Term) -> usize {
    fn go(t: &Term, in_subject: bool) -> usize {
        match t {
            Term::Let(_, s, b) => usize::from(in_subject) + go(s, true) + go(b, in_subject),
            _ => t.children().into_iter().map(|c| go(c, in_subject)).sum(),
        }
    }
    go(t, false)
}
