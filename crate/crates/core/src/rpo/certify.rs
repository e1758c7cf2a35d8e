use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::kernel::{SymbolId, Term};
use crate::rewrite::RewriteRule;

use super::{compact, Precedence, Rpo, RpoDerivation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertStatus {
    Certified,
    RefusedExtended,
    Failed,
}

impl CertStatus {
    pub fn label(self) -> &'static str {
        match self {
            CertStatus::Certified => "certified",
            CertStatus::RefusedExtended => "refused-extended",
            CertStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RuleCert {
    pub name: String,
    pub status: CertStatus,
    pub derivation: Option<RpoDerivation>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone)]
pub struct CertReport {
    pub precedence: Precedence,
    pub rules: Vec<RuleCert>,
    /// Every non-extended rule is certified.
    pub overall: bool,
}

impl CertReport {
    pub fn get(&self, name: &str) -> Option<&RuleCert> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn count(&self, status: CertStatus) -> usize {
        self.rules.iter().filter(|r| r.status == status).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("precedence: {}\n", self.precedence);
        for r in &self.rules {
            out.push_str(&format!("rule {}: {}\n", r.name, r.status.label()));
            if let Some(reason) = &r.reason {
                out.push_str(&format!("  reason: {reason}\n"));
            }
            if let Some(d) = &r.derivation {
                for line in d.to_text().lines() {
                    out.push_str(&format!("  {line}\n"));
                }
            }
        }
        out.push_str(&format!(
            "overall: {} ({} certified, {} refused-extended, {} failed)\n",
            if self.overall { "certified" } else { "failed" },
            self.count(CertStatus::Certified),
            self.count(CertStatus::RefusedExtended),
            self.count(CertStatus::Failed),
        ));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pairs: Vec<[String; 2]> = self
            .precedence
            .covering_pairs()
            .into_iter()
            .map(|(a, b)| [a.to_string(), b.to_string()])
            .collect();
        let rules: Vec<serde_json::Value> = self
            .rules
            .iter()
            .map(|r| {
                serde_json::json!({
                    "name": r.name,
                    "status": r.status,
                    "derivation": r.derivation.as_ref().map(RpoDerivation::to_json),
                    "reason": r.reason,
                })
            })
            .collect();
        serde_json::json!({ "precedence": pairs, "rules": rules, "overall": self.overall })
    }
}

fn var_names(t: &Term) -> BTreeSet<String> {
    t.free_vars().iter().map(|x| x.to_string()).collect()
}

fn certify_rule(
    prec: &Precedence,
    rule: &RewriteRule,
) -> (RuleCert, BTreeSet<(SymbolId, SymbolId)>) {
    let cert = |status, derivation, reason: Option<String>| RuleCert {
        name: rule.name.clone(),
        status,
        derivation,
        reason,
    };
    if rule.extended {
        let why = "extended rules lie outside the symbolic fragment".to_string();
        return (cert(CertStatus::RefusedExtended, None, Some(why)), BTreeSet::new());
    }
    if matches!(rule.lhs, Term::Var(_)) {
        return (cert(CertStatus::Failed, None, Some("left side is a variable".into())), BTreeSet::new());
    }
    for side in [&rule.lhs, &rule.rhs] {
        if !side.is_symbolic() {
            let why = format!("not in the symbolic fragment: {side}");
            return (cert(CertStatus::Failed, None, Some(why)), BTreeSet::new());
        }
    }
    let extra: Vec<String> = var_names(&rule.rhs).difference(&var_names(&rule.lhs)).cloned().collect();
    if !extra.is_empty() {
        let why = format!("right side variables not on the left: {}", extra.join(", "));
        return (cert(CertStatus::Failed, None, Some(why)), BTreeSet::new());
    }
    let mut rpo = Rpo::new(prec);
    match rpo.derive(&rule.lhs, &rule.rhs) {
        Some(d) => (cert(CertStatus::Certified, Some(d), None), BTreeSet::new()),
        None => {
            let why = format!("{} ≻ {} does not hold", compact(&rule.lhs), compact(&rule.rhs));
            let wishes = rpo.wishes().clone();
            (cert(CertStatus::Failed, None, Some(why)), wishes)
        }
    }
}

/// Certification plus the precedence pairs that failed rules asked for.
pub(super) fn certify_collect(
    prec: &Precedence,
    rules: &[RewriteRule],
) -> (CertReport, BTreeSet<(SymbolId, SymbolId)>) {
    let results: Vec<(RuleCert, BTreeSet<(SymbolId, SymbolId)>)> =
        rules.par_iter().map(|r| certify_rule(prec, r)).collect();
    let mut wishes = BTreeSet::new();
    let mut certs = Vec::with_capacity(results.len());
    for (c, w) in results {
        wishes.extend(w);
        certs.push(c);
    }
    let overall = certs.iter().all(|c| c.status != CertStatus::Failed);
    (CertReport { precedence: prec.clone(), rules: certs, overall }, wishes)
}

/// Attempts `lhs ≻ rhs` for every non-extended rule.
pub fn certify_ruleset(prec: &Precedence, rules: &[RewriteRule]) -> CertReport {
    certify_collect(prec, rules).0
}

/// Sets each rule's `certified` flag from a report over the same rules.
pub fn mark_certified(rules: &mut [RewriteRule], report: &CertReport) {
    for rule in rules.iter_mut() {
        rule.certified = report
            .get(&rule.name)
            .is_some_and(|c| c.status == CertStatus::Certified);
    }
}
