//! Strategy sets under a legal rule and the penalty that makes compliance pay.
//!
//! A moral code selects legal rules, and a rule carves the strategy set `S` down to the
//! allowed subset `P(r)`. A player who would rather deviate must face a transaction-cost
//! penalty large enough that the best allowed strategy beats every disallowed one.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_positive};
use crate::{Error, Result};

/// A named legal rule and the strategies it permits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegalRule {
    pub name: String,
    pub permitted: BTreeSet<String>,
}

/// A moral code is a label over a set of legal rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoralCode {
    pub name: String,
    pub rules: Vec<LegalRule>,
}

impl MoralCode {
    pub fn rule(&self, name: &str) -> Option<&LegalRule> {
        self.rules.iter().find(|r| r.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyGame {
    /// Player utility for every strategy in `S`.
    pub utilities: BTreeMap<String, f64>,
    /// `P(r)`.
    pub allowed: BTreeSet<String>,
}

impl StrategyGame {
    pub fn new(utilities: BTreeMap<String, f64>, allowed: BTreeSet<String>) -> Result<Self> {
        let g = StrategyGame { utilities, allowed };
        g.validate()?;
        Ok(g)
    }

    /// The game induced by `rule` on the given utilities.
    pub fn under_rule(utilities: BTreeMap<String, f64>, rule: &LegalRule) -> Result<Self> {
        Self::new(utilities, rule.permitted.clone())
    }

    pub fn validate(&self) -> Result<()> {
        if self.allowed.is_empty() {
            return Err(Error::invalid(
                "allowed",
                "must contain at least one strategy",
            ));
        }
        if let Some(s) = self
            .allowed
            .iter()
            .find(|s| !self.utilities.contains_key(*s))
        {
            return Err(Error::invalid(
                "allowed",
                format!("strategy `{s}` has no utility"),
            ));
        }
        for u in self.utilities.values() {
            check_finite("utilities", *u)?;
        }
        Ok(())
    }

    fn disallowed(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.utilities
            .iter()
            .filter(|(s, _)| !self.allowed.contains(*s))
    }

    /// Utility scale used for the default margin.
    pub fn utility_scale(&self) -> f64 {
        let m = self.utilities.values().fold(0.0f64, |m, u| m.max(u.abs()));
        if m > 0.0 {
            m
        } else {
            1.0
        }
    }

    /// `1e-6` times the utility scale.
    pub fn default_margin(&self) -> f64 {
        1e-6 * self.utility_scale()
    }

    /// Copy with `penalty` subtracted from every disallowed strategy.
    pub fn with_penalty(&self, penalty: f64) -> Self {
        let utilities = self
            .utilities
            .iter()
            .map(|(s, &u)| {
                let u = if self.allowed.contains(s) {
                    u
                } else {
                    u - penalty
                };
                (s.clone(), u)
            })
            .collect();
        StrategyGame {
            utilities,
            allowed: self.allowed.clone(),
        }
    }
}

fn argmax<'a>(it: impl Iterator<Item = (&'a String, &'a f64)>) -> Option<(&'a String, f64)> {
    // BTreeMap order plus strict improvement gives the lexicographically smallest winner.
    let mut best: Option<(&String, f64)> = None;
    for (s, &u) in it {
        if best.is_none_or(|(_, b)| u > b) {
            best = Some((s, u));
        }
    }
    best
}

/// Best allowed strategy. Ties go to the lexicographically smallest identifier.
pub fn best_allowed(g: &StrategyGame) -> (String, f64) {
    let (s, u) = argmax(g.utilities.iter().filter(|(s, _)| g.allowed.contains(*s)))
        .expect("allowed set is nonempty and every allowed strategy has a utility");
    (s.clone(), u)
}

/// Best strategy over all of `S`, same tie-break.
pub fn best_overall(g: &StrategyGame) -> (String, f64) {
    let (s, u) = argmax(g.utilities.iter()).expect("strategy set is nonempty");
    (s.clone(), u)
}

/// Social maximum `W_max` of a caller-supplied aggregate utility over `S`.
pub fn social_maximum(welfare: &BTreeMap<String, f64>) -> Option<(String, f64)> {
    argmax(welfare.iter()).map(|(s, u)| (s.clone(), u))
}

/// Smallest penalty on disallowed strategies that leaves the best allowed strategy ahead
/// of every disallowed one by at least `margin`:
/// `max(0, max_{s not in P(r)} U(s) - max_{s in P(r)} U(s) + margin)`.
pub fn min_compliance_penalty(g: &StrategyGame, margin: f64) -> Result<f64> {
    g.validate()?;
    check_positive("margin", margin)?;
    let (_, best_out) = argmax(g.disallowed()).ok_or(Error::NoDisallowedStrategy)?;
    let (_, best_in) = best_allowed(g);
    Ok((best_out - best_in + margin).max(0.0))
}

/// `true` when, after charging `penalty`, the best allowed strategy beats every disallowed
/// strategy by at least `margin`, up to a few ulps of the utilities involved.
pub fn dominates_with_margin(g: &StrategyGame, penalty: f64, margin: f64) -> bool {
    let (_, best_in) = best_allowed(g);
    g.disallowed().all(|(_, &u)| {
        let slack = 4.0 * f64::EPSILON * best_in.abs().max(u.abs()).max(penalty.abs());
        best_in - (u - penalty) >= margin - slack
    })
}
