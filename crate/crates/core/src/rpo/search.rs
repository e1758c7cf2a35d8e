use std::collections::BTreeSet;

use crate::kernel::SymbolId;
use crate::rewrite::RewriteRule;

use super::certify::certify_collect;
use super::Precedence;

/// Default cap on the number of distinct symbols a search may order.
pub const DEFAULT_SYMBOL_BOUND: usize = 8;

// Constraint sets tried before falling back to total orders.
const CONSTRAINT_STATES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("{count} symbols exceed the search bound of {bound}")]
    TooManySymbols { count: usize, bound: usize },
}

type Pairs = BTreeSet<(SymbolId, SymbolId)>;

fn rule_symbols(rules: &[RewriteRule]) -> Vec<SymbolId> {
    let mut set = BTreeSet::new();
    for r in rules.iter().filter(|r| !r.extended) {
        set.extend(r.lhs.symbols());
        set.extend(r.rhs.symbols());
    }
    set.into_iter().collect()
}

fn passes(pairs: &Pairs, rules: &[RewriteRule]) -> Option<(bool, Pairs)> {
    let prec = Precedence::from_pairs(pairs.iter().cloned()).ok()?;
    let (report, wishes) = certify_collect(&prec, rules);
    Some((report.overall, wishes))
}

/// Drops generating pairs one at a time while certification still passes.
fn minimize(mut pairs: Pairs, rules: &[RewriteRule]) -> Precedence {
    for p in pairs.clone() {
        let mut fewer = pairs.clone();
        fewer.remove(&p);
        if matches!(passes(&fewer, rules), Some((true, _))) {
            pairs = fewer;
        }
    }
    Precedence::from_pairs(pairs).expect("subset of an acyclic order")
}

fn constraint_search(rules: &[RewriteRule]) -> Option<Pairs> {
    let mut stack: Vec<Pairs> = vec![Pairs::new()];
    let mut seen: BTreeSet<Pairs> = stack.iter().cloned().collect();
    let mut explored = 0;
    while let Some(pairs) = stack.pop() {
        explored += 1;
        if explored > CONSTRAINT_STATES {
            return None;
        }
        let Some((ok, wishes)) = passes(&pairs, rules) else {
            continue;
        };
        if ok {
            return Some(pairs);
        }
        // reversed so the least wish is explored first
        for w in wishes.into_iter().rev() {
            if w.0 == w.1 || pairs.contains(&(w.1.clone(), w.0.clone())) {
                continue;
            }
            let mut next = pairs.clone();
            next.insert(w);
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
    None
}

// Lexicographic successor of a permutation of indices.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn total_order_search(symbols: &[SymbolId], rules: &[RewriteRule]) -> Option<Pairs> {
    let mut perm: Vec<usize> = (0..symbols.len()).collect();
    loop {
        let pairs: Pairs = (0..perm.len())
            .flat_map(|a| (a + 1..perm.len()).map(move |b| (a, b)))
            .map(|(a, b)| (symbols[perm[a]].clone(), symbols[perm[b]].clone()))
            .collect();
        if matches!(passes(&pairs, rules), Some((true, _))) {
            return Some(pairs);
        }
        if !next_permutation(&mut perm) {
            return None;
        }
    }
}

/// Finds a precedence under which every non-extended rule certifies.
///
/// Constraint sets are grown from the case-2 comparisons that failed; if
/// that does not succeed, every total order on the rule symbols is tried,
/// so `Ok(None)` means no precedence works. A found order is reduced to a
/// minimal set of generating pairs.
pub fn search_precedence(rules: &[RewriteRule], bound: usize) -> Result<Option<Precedence>, SearchError> {
    let symbols = rule_symbols(rules);
    if symbols.len() > bound {
        return Err(SearchError::TooManySymbols { count: symbols.len(), bound });
    }
    let found = constraint_search(rules).or_else(|| total_order_search(&symbols, rules));
    Ok(found.map(|pairs| minimize(pairs, rules)))
}
