use std::collections::BTreeMap;

use crate::kernel::{Name, Term};

/// A rewrite rule `lhs ~> rhs` over the symbolic fragment.
///
/// Rules flagged `extended` may also use `pure` on either side; a variable
/// under `pure` in the lhs matches a value. The engine runs extended rules
/// but the certifier refuses them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
    pub extended: bool,
    /// Set once the rule has been shown to descend in the path ordering.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("rule `{0}`: left-hand side is a bare variable")]
    BareVariableLhs(String),
    #[error("rule `{rule}`: variable `{var}` occurs on the right but not on the left")]
    RhsOnlyVariable { rule: String, var: Name },
    #[error("rule `{rule}`: {side} is outside the symbolic fragment: {term}")]
    NotSymbolic { rule: String, side: &'static str, term: Term },
}

fn in_extended_fragment(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::Pure(v) => in_extended_fragment(v),
        Term::Sym(_, args) => args.iter().all(in_extended_fragment),
        _ => false,
    }
}

impl RewriteRule {
    pub fn new(name: impl Into<String>, lhs: Term, rhs: Term) -> Result<Self, RuleError> {
        Self::build(name.into(), lhs, rhs, false)
    }

    pub fn extended(name: impl Into<String>, lhs: Term, rhs: Term) -> Result<Self, RuleError> {
        Self::build(name.into(), lhs, rhs, true)
    }

    fn build(name: String, lhs: Term, rhs: Term, extended: bool) -> Result<Self, RuleError> {
        if matches!(lhs, Term::Var(_)) {
            return Err(RuleError::BareVariableLhs(name));
        }
        let fragment = if extended { in_extended_fragment } else { Term::is_symbolic };
        for (side, t) in [("lhs", &lhs), ("rhs", &rhs)] {
            if !fragment(t) {
                return Err(RuleError::NotSymbolic { rule: name, side, term: t.clone() });
            }
        }
        let lvars = lhs.free_vars();
        if let Some(var) = rhs.free_vars().into_iter().find(|v| !lvars.contains(v)) {
            return Err(RuleError::RhsOnlyVariable { rule: name, var });
        }
        Ok(RewriteRule { name, lhs, rhs, extended, certified: false })
    }

    /// Contracts `subject` at its root if the lhs matches.
    pub fn apply(&self, subject: &Term) -> Option<Term> {
        let sigma = match_pattern(&self.lhs, subject)?;
        Some(self.rhs.substitute_many(&sigma))
    }
}

/// First-order matching: a substitution `σ` with `pattern[σ] = subject`.
/// Repeated pattern variables must match alpha-equivalent subterms.
pub fn match_pattern(pattern: &Term, subject: &Term) -> Option<BTreeMap<Name, Term>> {
    let mut sigma = BTreeMap::new();
    match_into(pattern, subject, &mut sigma).then_some(sigma)
}

fn match_into(pattern: &Term, subject: &Term, sigma: &mut BTreeMap<Name, Term>) -> bool {
    match (pattern, subject) {
        (Term::Var(x), _) => match sigma.get(x) {
            Some(bound) => bound.alpha_eq(subject),
            None => {
                sigma.insert(x.clone(), subject.clone());
                true
            }
        },
        (Term::Sym(f, ps), Term::Sym(g, ts)) => {
            f == g && ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, t)| match_into(p, t, sigma))
        }
        (Term::Pure(p), Term::Pure(t)) => match_into(p, t, sigma),
        _ => false,
    }
}
