use std::collections::BTreeSet;
use std::fmt;

use crate::kernel::SymbolId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PrecedenceError {
    #[error("precedence is not irreflexive: {0} > {0} follows from the declared pairs")]
    Cycle(SymbolId),
}

/// A strict partial order on symbol identities, stored transitively closed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Precedence {
    closed: BTreeSet<(SymbolId, SymbolId)>,
}

impl Precedence {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Closes the pairs transitively and rejects cycles.
    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (SymbolId, SymbolId)>,
    ) -> Result<Self, PrecedenceError> {
        let mut closed: BTreeSet<(SymbolId, SymbolId)> = pairs.into_iter().collect();
        loop {
            let mut added = Vec::new();
            for (a, b) in &closed {
                for (_, d) in closed.iter().filter(|(c, _)| c == b) {
                    let pair = (a.clone(), d.clone());
                    if !closed.contains(&pair) {
                        added.push(pair);
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            closed.extend(added);
        }
        if let Some((a, _)) = closed.iter().find(|(a, b)| a == b) {
            return Err(PrecedenceError::Cycle(a.clone()));
        }
        Ok(Precedence { closed })
    }

    pub fn greater(&self, a: &SymbolId, b: &SymbolId) -> bool {
        self.closed.contains(&(a.clone(), b.clone()))
    }

    /// All ordered pairs, closed under transitivity.
    pub fn pairs(&self) -> impl Iterator<Item = &(SymbolId, SymbolId)> {
        self.closed.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.closed.is_empty()
    }

    /// `self` with `a > b` added, or an error if that creates a cycle.
    pub fn with(&self, a: SymbolId, b: SymbolId) -> Result<Self, PrecedenceError> {
        Precedence::from_pairs(self.closed.iter().cloned().chain([(a, b)]))
    }

    /// The transitive reduction: the pairs not implied by others.
    pub fn covering_pairs(&self) -> Vec<(SymbolId, SymbolId)> {
        self.closed
            .iter()
            .filter(|(a, b)| {
                !self
                    .closed
                    .iter()
                    .any(|(x, m)| x == a && m != b && self.greater(m, b))
            })
            .cloned()
            .collect()
    }
}

impl fmt::Display for Precedence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.closed.is_empty() {
            return write!(f, "(empty)");
        }
        let parts: Vec<String> =
            self.covering_pairs().iter().map(|(a, b)| format!("{a} > {b}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}
