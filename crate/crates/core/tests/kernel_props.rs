mod common;

use common::{rng, TermGen};
use effect_rewrite::kernel::{
    alpha_eq, free_vars, infer_open, parse_term, print_term, substitute, Name, SymbolId, Term,
};
use effect_rewrite::theories::{builtin, BUILTIN_NAMES};
use proptest::prelude::*;

// Locally nameless form: bound variables as indices, free ones by name.
// Substituting a free name needs no shifting, so it serves as an oracle
// for capture-avoiding substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Db {
    Free(Name),
    Bound(usize),
    Lam(Box<Db>),
    App(Box<Db>, Box<Db>),
    Pure(Box<Db>),
    Let(Box<Db>, Box<Db>),
    Sym(SymbolId, Vec<Db>),
}

fn db(t: &Term) -> Db {
    fn go(t: &Term, env: &mut Vec<Name>) -> Db {
        match t {
            Term::Var(x) => match env.iter().rev().position(|y| y == x) {
                Some(i) => Db::Bound(i),
                None => Db::Free(x.clone()),
            },
            Term::Lam(x, b) => {
                env.push(x.clone());
                let b = go(b, env);
                env.pop();
                Db::Lam(Box::new(b))
            }
            Term::App(f, a) => Db::App(Box::new(go(f, env)), Box::new(go(a, env))),
            Term::Pure(v) => Db::Pure(Box::new(go(v, env))),
            Term::Let(x, s, b) => {
                let s = go(s, env);
                env.push(x.clone());
                let b = go(b, env);
                env.pop();
                Db::Let(Box::new(s), Box::new(b))
            }
            Term::Sym(id, args) => Db::Sym(id.clone(), args.iter().map(|a| go(a, env)).collect()),
        }
    }
    go(t, &mut Vec::new())
}

fn db_subst(t: &Db, x: &str, u: &Db) -> Db {
    let rec = |t: &Db| Box::new(db_subst(t, x, u));
    match t {
        Db::Free(y) if &**y == x => u.clone(),
        Db::Free(_) | Db::Bound(_) => t.clone(),
        Db::Lam(b) => Db::Lam(rec(b)),
        Db::App(f, a) => Db::App(rec(f), rec(a)),
        Db::Pure(v) => Db::Pure(rec(v)),
        Db::Let(s, b) => Db::Let(rec(s), rec(b)),
        Db::Sym(id, args) => Db::Sym(id.clone(), args.iter().map(|a| db_subst(a, x, u)).collect()),
    }
}

// Raw terms with heavy name reuse, to provoke capture.
fn raw_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![Just("x"), Just("y"), Just("z")].prop_map(Term::var);
    leaf.prop_recursive(5, 40, 3, |inner| {
        let binder = prop_oneof![Just("x"), Just("y"), Just("z")];
        prop_oneof![
            (binder.clone(), inner.clone()).prop_map(|(x, b)| Term::lam(x, b)),
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            inner.clone().prop_map(Term::pure),
            (binder, inner.clone(), inner.clone()).prop_map(|(x, s, b)| Term::let_(x, s, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Term::eff("or", vec![a, b])),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn substitution_matches_locally_nameless_oracle(
        t in raw_term(),
        u in raw_term(),
        x in prop_oneof![Just("x"), Just("y"), Just("z")],
    ) {
        let got = substitute(&t, x, &u);
        prop_assert_eq!(db(&got), db_subst(&db(&t), x, &db(&u)));
    }

    #[test]
    fn substitution_free_variables(
        t in raw_term(),
        u in raw_term(),
        x in prop_oneof![Just("x"), Just("y"), Just("z")],
    ) {
        let got = substitute(&t, x, &u);
        let mut expected = free_vars(&t);
        if expected.remove(x) {
            expected.extend(free_vars(&u));
        }
        prop_assert_eq!(free_vars(&got), expected);
    }

    #[test]
    fn substituting_an_absent_variable_is_identity(t in raw_term(), u in raw_term()) {
        prop_assert_eq!(substitute(&t, "w", &u), t);
    }

    #[test]
    fn alpha_equivalence_is_locally_nameless_equality(a in raw_term(), b in raw_term()) {
        prop_assert_eq!(alpha_eq(&a, &b), db(&a) == db(&b));
        prop_assert!(alpha_eq(&a, &a));
        prop_assert!(alpha_eq(&a, &a.canonical()));
    }

    #[test]
    fn renaming_a_binder_preserves_alpha(b in raw_term()) {
        let t = Term::lam("x", b.clone());
        let renamed = Term::lam("q", substitute(&b, "x", &Term::var("q")));
        prop_assert!(!free_vars(&b).contains("q"));
        prop_assert!(alpha_eq(&t, &renamed));
    }

    #[test]
    fn generated_terms_typecheck_and_round_trip(seed in any::<u64>(), which in 0usize..5) {
        let th = builtin(BUILTIN_NAMES[which]).unwrap();
        let mut r = rng(seed);
        let t = TermGen::new(th.signature()).term(&mut r, 25);
        prop_assert!(t.size() <= 25);
        prop_assert!(infer_open(&t, th.signature()).is_ok(), "ill-typed: {}", t);
        let back = parse_term(&print_term(&t), th.signature()).unwrap();
        prop_assert_eq!(back, t);
    }
}

#[test]
fn capture_example() {
    // (λy. x){y/x} renames the binder
    let got = substitute(&Term::lam("y", Term::var("x")), "x", &Term::var("y"));
    assert!(alpha_eq(&got, &Term::lam("z", Term::var("y"))));
    assert!(!alpha_eq(&got, &Term::lam("y", Term::var("y"))));
}
