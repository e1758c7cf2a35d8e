//! Exhaustive exploration of all reduction sequences from a term.
//!
//! Nodes are alpha-equivalence classes, keyed by `Term::canonical`.
//! Exploration is breadth-first and level-synchronous: the successors of a
//! whole frontier are computed in parallel, then merged in frontier order,
//! so node numbering does not depend on the thread pool.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::kernel::{Position, Term};

use super::engine::{sites, RuleRef};
use super::rule::RewriteRule;

pub const DEFAULT_GRAPH_FUEL: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub rule: RuleRef,
    pub rule_name: String,
    pub position: Position,
}

#[derive(Debug, Clone)]
pub struct ReductionGraph {
    /// The first-seen representative of each node; node 0 is the start.
    pub nodes: Vec<Term>,
    pub edges: Vec<Edge>,
    /// Expanded nodes without successors.
    pub normal_forms: Vec<usize>,
    /// Set when the node bound stopped exploration early.
    pub truncated: bool,
    expanded: Vec<bool>,
}

impl ReductionGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn normal_form_terms(&self) -> Vec<&Term> {
        self.normal_forms.iter().map(|&i| &self.nodes[i]).collect()
    }

    pub fn is_expanded(&self, node: usize) -> bool {
        self.expanded[node]
    }

    /// Looks up the node alpha-equivalent to `t`.
    pub fn find(&self, t: &Term) -> Option<usize> {
        let key = t.canonical();
        self.nodes.iter().position(|n| n.canonical() == key)
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            succ[e.from].push(e.to);
        }
        succ
    }

    /// A topological order of the explored part, or `None` if it has a cycle.
    fn topological_order(&self) -> Option<Vec<usize>> {
        let succ = self.successors();
        let mut indegree = vec![0usize; self.nodes.len()];
        for e in &self.edges {
            indegree[e.to] += 1;
        }
        let mut ready: Vec<usize> = (0..self.nodes.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(n) = ready.pop() {
            order.push(n);
            for &m in &succ[n] {
                indegree[m] -= 1;
                if indegree[m] == 0 {
                    ready.push(m);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    /// Whether the explored part is free of cycles.
    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Length of the longest reduction sequence from the start node; only
    /// meaningful for a complete, acyclic graph.
    pub fn longest_path(&self) -> Option<usize> {
        if self.truncated {
            return None;
        }
        let order = self.topological_order()?;
        let succ = self.successors();
        let mut longest = vec![0usize; self.nodes.len()];
        for &n in order.iter().rev() {
            longest[n] = succ[n].iter().map(|&m| longest[m] + 1).max().unwrap_or(0);
        }
        Some(longest[0])
    }

    /// Graphviz rendering: nodes labelled with their terms, edges with rule
    /// names; normal forms get a double border.
    pub fn to_dot(&self) -> String {
        fn esc(s: &str) -> String {
            s.replace('\\', "\\\\").replace('"', "\\\"")
        }
        let mut out = String::from("digraph reductions {\n");
        for (i, t) in self.nodes.iter().enumerate() {
            let extra = if self.normal_forms.contains(&i) { ", peripheries=2" } else { "" };
            out.push_str(&format!("  n{i} [label=\"{}\"{extra}];\n", esc(&t.canonical().to_string())));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  n{} -> n{} [label=\"{} @ {}\"];\n",
                e.from,
                e.to,
                esc(&e.rule_name),
                e.position
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Explores every reduction from `t` under the metalanguage rules and
/// `rules`, up to `fuel` distinct nodes.
pub fn reduction_graph(t: &Term, rules: &[RewriteRule], fuel: usize) -> ReductionGraph {
    let mut graph = ReductionGraph {
        nodes: vec![t.clone()],
        edges: Vec::new(),
        normal_forms: Vec::new(),
        truncated: false,
        expanded: vec![false],
    };
    if fuel == 0 {
        graph.nodes.clear();
        graph.expanded.clear();
        graph.truncated = true;
        return graph;
    }
    let mut index: HashMap<Term, usize> = HashMap::new();
    index.insert(t.canonical(), 0);
    let mut frontier = vec![0usize];

    while !frontier.is_empty() && !graph.truncated {
        let expansions: Vec<Vec<(Term, Term, RuleRef, Position)>> = frontier
            .par_iter()
            .map(|&n| {
                let node = &graph.nodes[n];
                sites(node, rules, true, true)
                    .into_iter()
                    .map(|s| {
                        let reduct = node.replace_at(&s.position, s.contractum).expect("valid site");
                        let key = reduct.canonical();
                        (reduct, key, s.rule, s.position)
                    })
                    .collect()
            })
            .collect();

        let mut next = Vec::new();
        'merge: for (&n, succs) in frontier.iter().zip(expansions) {
            for (reduct, key, rule, position) in succs {
                let to = match index.get(&key) {
                    Some(&m) => m,
                    None => {
                        if graph.nodes.len() >= fuel {
                            graph.truncated = true;
                            break 'merge;
                        }
                        let m = graph.nodes.len();
                        graph.nodes.push(reduct);
                        graph.expanded.push(false);
                        index.insert(key, m);
                        next.push(m);
                        m
                    }
                };
                let rule_name = match rule {
                    RuleRef::Ml(m) => m.name().to_string(),
                    RuleRef::Symbolic(i) => rules[i].name.clone(),
                };
                graph.edges.push(Edge { from: n, to, rule, rule_name, position });
            }
            graph.expanded[n] = true;
        }
        frontier = next;
    }

    let mut has_out = vec![false; graph.nodes.len()];
    for e in &graph.edges {
        has_out[e.from] = true;
    }
    graph.normal_forms =
        (0..graph.nodes.len()).filter(|&i| graph.expanded[i] && !has_out[i]).collect();
    graph
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: &str) -> Term {
        Term::pure(Term::var(x))
    }

    fn or(a: Term, b: Term) -> Term {
        Term::eff("or", vec![a, b])
    }

    fn or_rule() -> RewriteRule {
        let v = Term::var;
        RewriteRule::new("or-assoc", or(or(v("s1"), v("s2")), v("s3")), or(v("s1"), or(v("s2"), v("s3"))))
            .unwrap()
    }

    #[test]
    fn normal_term_is_a_single_node() {
        let g = reduction_graph(&p("v"), &[], 10);
        assert_eq!(g.node_count(), 1);
        assert!(g.edges.is_empty());
        assert_eq!(g.normal_forms, vec![0]);
        assert_eq!(g.longest_path(), Some(0));
    }

    #[test]
    fn or_tree_is_linear() {
        let g = reduction_graph(&or(or(p("a"), p("b")), p("c")), &[or_rule()], 10);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.normal_form_terms(), vec![&or(p("a"), or(p("b"), p("c")))]);
        assert_eq!(g.longest_path(), Some(1));
        assert!(g.is_acyclic());
    }

    #[test]
    fn alpha_equivalent_reducts_share_a_node() {
        // both beta steps give λz.z up to renaming
        let t = Term::app(Term::lam("x", Term::lam("y", Term::var("y"))), Term::lam("z", Term::var("z")));
        let g = reduction_graph(&t, &[], 10);
        assert_eq!(g.node_count(), 2);
        assert!(g.find(&Term::lam("q", Term::var("q"))).is_some());
    }

    #[test]
    fn cycles_are_detected_and_fuel_truncates() {
        let v = Term::var;
        let swap = RewriteRule::new("swap", or(v("x"), v("y")), or(v("y"), v("x"))).unwrap();
        let g = reduction_graph(&or(p("a"), p("b")), std::slice::from_ref(&swap), 10);
        assert!(!g.truncated);
        assert!(!g.is_acyclic());
        assert_eq!(g.longest_path(), None);
        assert!(g.normal_forms.is_empty());

        let g = reduction_graph(&or(or(p("a"), p("b")), or(p("c"), p("d"))), &[swap], 3);
        assert!(g.truncated);
        assert_eq!(g.node_count(), 3);
    }

    #[test]
    fn dot_output_labels_edges() {
        let g = reduction_graph(&or(or(p("a"), p("b")), p("c")), &[or_rule()], 10);
        let dot = g.to_dot();
        assert!(dot.starts_with("digraph reductions {"));
        assert!(dot.contains("n0 -> n1 [label=\"or-assoc @ ε\"]"));
        assert!(dot.contains("peripheries=2"));
    }
}
