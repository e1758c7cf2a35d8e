//! Redex enumeration and reduction for the metalanguage rules and user
//! symbolic rules: strategies, traces, the let-nesting measure and an
//! exhaustive reduction-graph explorer.

mod engine;
mod graph;
mod rule;

pub use engine::{
    left_nesting_measure, ml_redexes, normalize, redexes, step, symbolic_redexes, FuelExhausted,
    MlRule, Redex, RewriteError, RuleRef, Strategy, Trace, DEFAULT_NORMALIZE_FUEL,
};
pub use graph::{reduction_graph, Edge, ReductionGraph, DEFAULT_GRAPH_FUEL};
pub use rule::{match_pattern, RewriteRule, RuleError};
