//! Type inference for the typing rules of the metalanguage.
//!
//! Lambda binders carry no annotation, so inference runs first-order
//! unification over `Type::Var`. Effect symbols are polymorphic: each
//! occurrence `e(t1, ..., tn)` gets a fresh `T` with every `ti : E(T)`.

use std::collections::BTreeMap;

use super::term::{Name, Term};
use super::types::{equiv_all, Arity, Signature, SignatureError, Type, TypingContext};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    Unbound(Name),
    #[error(transparent)]
    Symbol(#[from] SignatureError),
    #[error("{context}: expected {expected}, found {found}")]
    Mismatch { context: String, expected: Type, found: Type },
    #[error("{context}: infinite type ({var} occurs in {ty})")]
    Occurs { context: String, var: Type, ty: Type },
    #[error("rule sides disagree: lhs : {lhs}, rhs : {rhs}")]
    RuleSides { lhs: Type, rhs: Type },
    #[error("rhs constrains the lhs typing: lhs alone types as {lhs}, with rhs as {joint}")]
    RuleSpecializes { lhs: String, joint: String },
}

#[derive(Default)]
struct Infer {
    bindings: Vec<Option<Type>>,
    offset: u32,
}

impl Infer {
    fn starting_after(ctx: &TypingContext) -> Self {
        let mut vars = Vec::new();
        for (_, t) in ctx.entries() {
            t.vars(&mut vars);
        }
        let offset = vars.iter().max().map_or(0, |m| m + 1);
        Infer { bindings: Vec::new(), offset }
    }

    fn fresh(&mut self) -> Type {
        self.bindings.push(None);
        Type::Var(self.offset + self.bindings.len() as u32 - 1)
    }

    fn binding(&self, v: u32) -> Option<&Type> {
        v.checked_sub(self.offset)
            .and_then(|i| self.bindings.get(i as usize))
            .and_then(Option::as_ref)
    }

    fn bind(&mut self, v: u32, t: Type) {
        match v.checked_sub(self.offset) {
            Some(i) => self.bindings[i as usize] = Some(t),
            // a variable from the caller's context; make room for it
            None => {
                let shift = self.offset - v;
                let mut b = vec![None; shift as usize];
                b.append(&mut self.bindings);
                self.bindings = b;
                self.offset = v;
                self.bindings[0] = Some(t);
            }
        }
    }

    fn resolve(&self, t: &Type) -> Type {
        match t {
            Type::Var(v) => match self.binding(*v) {
                Some(b) => self.resolve(b),
                None => t.clone(),
            },
            Type::Base(_) => t.clone(),
            Type::Eff(i) => Type::eff(self.resolve(i)),
            Type::Arrow(a, b) => Type::arrow(self.resolve(a), self.resolve(b)),
        }
    }

    fn occurs(&self, v: u32, t: &Type) -> bool {
        match t {
            Type::Var(w) => match self.binding(*w) {
                Some(b) => self.occurs(v, b),
                None => *w == v,
            },
            Type::Base(_) => false,
            Type::Eff(i) => self.occurs(v, i),
            Type::Arrow(a, b) => self.occurs(v, a) || self.occurs(v, b),
        }
    }

    fn shallow(&self, t: &Type) -> Type {
        match t {
            Type::Var(v) => match self.binding(*v) {
                Some(b) => self.shallow(b),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    /// Unifies `found` with `expected`; errors report the resolved types.
    fn unify(&mut self, expected: &Type, found: &Type, context: &str) -> Result<(), TypeError> {
        let ok = self.unify_inner(expected, found);
        ok.map_err(|occurs| match occurs {
            Some((var, ty)) => TypeError::Occurs {
                context: context.into(),
                var: self.resolve(&var),
                ty: self.resolve(&ty),
            },
            None => TypeError::Mismatch {
                context: context.into(),
                expected: self.resolve(expected),
                found: self.resolve(found),
            },
        })
    }

    // Err(None) is a constructor clash, Err(Some(..)) an occurs failure.
    fn unify_inner(&mut self, a: &Type, b: &Type) -> Result<(), Option<(Type, Type)>> {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (Type::Var(u), Type::Var(v)) => {
                // keep the older variable as representative
                if u != v {
                    self.bind(*u.max(v), Type::Var(*u.min(v)));
                }
                Ok(())
            }
            (Type::Var(u), t) | (t, Type::Var(u)) => {
                if self.occurs(*u, t) {
                    return Err(Some((Type::Var(*u), t.clone())));
                }
                self.bind(*u, t.clone());
                Ok(())
            }
            (Type::Base(x), Type::Base(y)) if x == y => Ok(()),
            (Type::Eff(x), Type::Eff(y)) => self.unify_inner(x, y),
            (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => {
                self.unify_inner(a1, a2)?;
                self.unify_inner(b1, b2)
            }
            _ => Err(None),
        }
    }

    fn infer(
        &mut self,
        ctx: &mut TypingContext,
        t: &Term,
        sig: &Signature,
    ) -> Result<Type, TypeError> {
        match t {
            Term::Var(x) => ctx.lookup(x).cloned().ok_or_else(|| TypeError::Unbound(x.clone())),
            Term::Lam(x, body) => {
                let dom = self.fresh();
                ctx.push(x.clone(), dom.clone());
                let cod = self.infer(ctx, body, sig);
                ctx.pop();
                Ok(Type::arrow(dom, cod?))
            }
            Term::App(f, a) => {
                let tf = self.infer(ctx, f, sig)?;
                let ta = self.infer(ctx, a, sig)?;
                let r = self.fresh();
                self.unify(&Type::arrow(ta, r.clone()), &tf, "application")?;
                Ok(r)
            }
            Term::Pure(v) => Ok(Type::eff(self.infer(ctx, v, sig)?)),
            Term::Let(x, s, body) => {
                let ts = self.infer(ctx, s, sig)?;
                let inner = self.fresh();
                self.unify(&Type::eff(inner.clone()), &ts, "let subject")?;
                ctx.push(x.clone(), inner);
                let tb = self.infer(ctx, body, sig);
                ctx.pop();
                let tb = tb?;
                let res = self.fresh();
                self.unify(&Type::eff(res), &tb, "let body")?;
                Ok(tb)
            }
            Term::Sym(id, args) => {
                let decl = sig.get(&id.name).ok_or_else(|| SignatureError::Unknown(id.name.clone()))?;
                let params: Vec<&str> = id.param.iter().map(|p| &**p).collect();
                sig.resolve(&id.name, &params, args.len())?;
                match &decl.arity {
                    Arity::Effect(_) => {
                        let res = Type::eff(self.fresh());
                        for (i, a) in args.iter().enumerate() {
                            let ta = self.infer(ctx, a, sig)?;
                            let what = format!("argument {} of effect `{}`", i + 1, id.name);
                            self.unify(&res, &ta, &what)?;
                        }
                        Ok(res)
                    }
                    Arity::Function { params, result } => {
                        for (i, (a, p)) in args.iter().zip(params).enumerate() {
                            let ta = self.infer(ctx, a, sig)?;
                            let what = format!("argument {} of function `{}`", i + 1, id.name);
                            self.unify(p, &ta, &what)?;
                        }
                        Ok(result.clone())
                    }
                }
            }
        }
    }
}

/// The principal type of `t` under `ctx`. Any type variables left in the
/// result are unconstrained.
pub fn infer_type(ctx: &TypingContext, t: &Term, sig: &Signature) -> Result<Type, TypeError> {
    let mut inf = Infer::starting_after(ctx);
    let mut ctx = ctx.clone();
    let ty = inf.infer(&mut ctx, t, sig)?;
    Ok(inf.resolve(&ty))
}

/// Infers a type for a term with free variables, assigning each free
/// variable a fresh type. Returns the solved bindings and the type.
pub fn infer_open(t: &Term, sig: &Signature) -> Result<(TypingContext, Type), TypeError> {
    let mut inf = Infer::default();
    let mut ctx = TypingContext::new();
    for x in t.free_vars() {
        let v = inf.fresh();
        ctx.push(x, v);
    }
    let ty = inf.infer(&mut ctx, t, sig)?;
    let mut solved = TypingContext::new();
    for (x, v) in ctx.entries() {
        solved.push(x.clone(), inf.resolve(v));
    }
    Ok((solved, inf.resolve(&ty)))
}

/// `t` can be given type `expected` under `ctx`: its principal type is at
/// least as general as `expected`.
pub fn has_type(ctx: &TypingContext, t: &Term, sig: &Signature, expected: &Type) -> bool {
    infer_type(ctx, t, sig).is_ok_and(|ty| ty.generalizes(expected))
}

/// Result of checking a rewrite rule: the shared variable typing and the
/// common type of both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTyping {
    pub vars: BTreeMap<Name, Type>,
    pub ty: Type,
}

/// Checks that `lhs` and `rhs` type at the same type under one shared
/// typing of the rule variables. With `strict`, the rhs must not constrain
/// anything the lhs leaves open, so every well-typed instance of the lhs
/// rewrites to a term of the same type.
pub fn check_rule_sides(
    lhs: &Term,
    rhs: &Term,
    sig: &Signature,
    strict: bool,
) -> Result<RuleTyping, TypeError> {
    let mut inf = Infer::default();
    let mut ctx = TypingContext::new();
    let mut vars = lhs.free_vars();
    vars.extend(rhs.free_vars());
    for x in &vars {
        let v = inf.fresh();
        ctx.push(x.clone(), v);
    }
    let tl = inf.infer(&mut ctx, lhs, sig)?;
    let lhs_vars = lhs.free_vars();
    let snapshot = |inf: &Infer, ctx: &TypingContext| -> Vec<Type> {
        let mut out: Vec<Type> = ctx
            .entries()
            .iter()
            .filter(|(x, _)| lhs_vars.contains(x))
            .map(|(_, t)| inf.resolve(t))
            .collect();
        out.push(inf.resolve(&tl));
        out
    };
    let before = snapshot(&inf, &ctx);
    let tr = inf.infer(&mut ctx, rhs, sig)?;
    if inf.unify_inner(&tl, &tr).is_err() {
        return Err(TypeError::RuleSides { lhs: inf.resolve(&tl), rhs: inf.resolve(&tr) });
    }
    let after = snapshot(&inf, &ctx);
    if strict && !equiv_all(&before, &after) {
        let show = |ts: &[Type]| ts.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        return Err(TypeError::RuleSpecializes { lhs: show(&before), joint: show(&after) });
    }
    Ok(RuleTyping {
        vars: ctx.entries().iter().map(|(x, t)| (x.clone(), inf.resolve(t))).collect(),
        ty: inf.resolve(&tl),
    })
}
