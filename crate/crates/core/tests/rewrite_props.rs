mod common;

use common::{count_symbol, or_leaves, or_tree, preserves_type, right_nested, rng, TermGen};
use effect_rewrite::kernel::Term;
use effect_rewrite::rewrite::{
    left_nesting_measure, ml_redexes, normalize, reduction_graph, redexes, step, MlRule, RuleRef,
    Strategy,
};
use effect_rewrite::rpo::{certify_ruleset, mark_certified};
use effect_rewrite::theories::{builtin, Theory, BUILTIN_NAMES};
use proptest::prelude::*;

fn certified_theory(name: &str) -> (Theory, Vec<effect_rewrite::rewrite::RewriteRule>) {
    let th = builtin(name).unwrap();
    let mut rules = th.rules().to_vec();
    let report = certify_ruleset(th.precedence(), &rules);
    mark_certified(&mut rules, &report);
    (th, rules)
}

fn strategies(seed: u64) -> [Strategy; 3] {
    [Strategy::LeftmostOutermost, Strategy::RightmostInnermost, Strategy::Random(seed)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_steps_preserve_types(seed in any::<u64>(), which in 0usize..5) {
        let (th, rules) = certified_theory(BUILTIN_NAMES[which]);
        let t = TermGen::new(th.signature()).term(&mut rng(seed), 20);
        for r in redexes(&t, &rules) {
            let keep = match r.rule {
                RuleRef::Ml(_) => true,
                RuleRef::Symbolic(i) => rules[i].certified,
            };
            if keep {
                prop_assert!(preserves_type(th.signature(), &t, &r.reduct), "{} by {}", t, r.rule_name);
            }
        }
    }

    #[test]
    fn normal_forms_agree_with_the_reduction_graph(seed in any::<u64>(), which in 0usize..5) {
        let th = builtin(BUILTIN_NAMES[which]).unwrap();
        let t = TermGen::new(th.signature()).term(&mut rng(seed), 14);
        let g = reduction_graph(&t, th.rules(), 20_000);
        prop_assume!(!g.truncated);
        for s in strategies(seed) {
            let (nf, trace) = normalize(&t, th.rules(), s, 10_000).unwrap();
            prop_assert!(redexes(&nf, th.rules()).is_empty());
            prop_assert!(trace.is_consistent());
            let node = g.find(&nf);
            prop_assert!(node.is_some_and(|n| g.normal_forms.contains(&n)), "{} not a graph normal form", nf);
            prop_assert!(trace.len() <= g.longest_path().unwrap());
        }
    }

    #[test]
    fn graph_edges_are_single_steps(seed in any::<u64>(), which in 0usize..5) {
        let th = builtin(BUILTIN_NAMES[which]).unwrap();
        let t = TermGen::new(th.signature()).term(&mut rng(seed), 12);
        let g = reduction_graph(&t, th.rules(), 5_000);
        for e in &g.edges {
            let from = &g.nodes[e.from];
            let matching = redexes(from, th.rules())
                .into_iter()
                .find(|r| r.position == e.position && r.rule == e.rule)
                .expect("edge corresponds to a redex");
            prop_assert!(step(from, &matching).unwrap().alpha_eq(&g.nodes[e.to]));
        }
        for &n in &g.normal_forms {
            prop_assert!(redexes(&g.nodes[n], th.rules()).is_empty());
        }
    }

    #[test]
    fn random_strategy_is_deterministic(seed in any::<u64>(), which in 0usize..5) {
        let th = builtin(BUILTIN_NAMES[which]).unwrap();
        let t = TermGen::new(th.signature()).term(&mut rng(seed), 20);
        let a = normalize(&t, th.rules(), Strategy::Random(seed), 10_000).unwrap();
        let b = normalize(&t, th.rules(), Strategy::Random(seed), 10_000).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn let_assoc_decreases_the_nesting_measure(seed in any::<u64>()) {
        let th = builtin("nondet").unwrap();
        let t = TermGen::new(th.signature()).term(&mut rng(seed), 25);
        for r in ml_redexes(&t).into_iter().filter(|r| r.rule == RuleRef::Ml(MlRule::LetAssoc)) {
            prop_assert!(left_nesting_measure(&r.redex) > left_nesting_measure(&r.contractum));
        }
    }

    #[test]
    fn or_steps_keep_leaves_and_count(seed in any::<u64>(), leaves in 1usize..12) {
        let th = builtin("nondet").unwrap();
        let t = or_tree(&mut rng(seed), leaves);
        let (nf, trace) = normalize(&t, th.rules(), Strategy::Random(seed), 10_000).unwrap();
        for u in trace.terms() {
            prop_assert_eq!(or_leaves(u), or_leaves(&t));
            prop_assert_eq!(count_symbol(u, "or"), leaves - 1);
        }
        prop_assert!(right_nested(&nf));
    }
}

#[test]
fn fuel_boundary() {
    let th = builtin("nondet").unwrap();
    let t = or_tree(&mut rng(3), 6);
    let (nf, trace) = normalize(&t, th.rules(), Strategy::LeftmostOutermost, 10_000).unwrap();
    let n = trace.len();
    assert!(n > 0);
    assert_eq!(normalize(&t, th.rules(), Strategy::LeftmostOutermost, n).unwrap().0, nf);
    let err = normalize(&t, th.rules(), Strategy::LeftmostOutermost, n - 1).unwrap_err();
    assert_eq!(err.trace.len(), n - 1);
    let normal = Term::pure(Term::var("a"));
    assert!(normalize(&normal, th.rules(), Strategy::LeftmostOutermost, 0).is_ok());
}
