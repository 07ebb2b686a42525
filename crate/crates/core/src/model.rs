//! Dispute primitives and the introductory decision rules.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_nonneg, check_positive, check_unit};
use crate::Result;

/// Primitives of a two-party dispute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseParameters {
    /// Probability that the plaintiff wins at trial.
    pub p: f64,
    /// Plaintiff's benefit from winning at trial.
    #[serde(rename = "W_B")]
    pub win_benefit: f64,
    /// Settlement benefit.
    #[serde(rename = "S_B")]
    pub settlement_benefit: f64,
    /// Administration (trial) costs.
    #[serde(rename = "C_a")]
    pub admin_cost: f64,
    /// Bargaining costs.
    #[serde(rename = "C_b")]
    pub bargaining_cost: f64,
}

impl CaseParameters {
    pub fn new(
        p: f64,
        win_benefit: f64,
        settlement_benefit: f64,
        admin_cost: f64,
        bargaining_cost: f64,
    ) -> Result<Self> {
        let c = CaseParameters {
            p,
            win_benefit,
            settlement_benefit,
            admin_cost,
            bargaining_cost,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("p", self.p)?;
        check_nonneg("W_B", self.win_benefit)?;
        check_nonneg("S_B", self.settlement_benefit)?;
        check_nonneg("C_a", self.admin_cost)?;
        check_nonneg("C_b", self.bargaining_cost)?;
        Ok(())
    }

    /// Expected judgment `p * W_B`.
    pub fn expected_judgment(&self) -> f64 {
        self.p * self.win_benefit
    }

    /// Expectation benefit component `P_C = (p W_B + S_B) / 2`.
    pub fn expectation_benefit(&self) -> f64 {
        0.5 * (self.expected_judgment() + self.settlement_benefit)
    }

    /// Transaction-cost component `L_C = (C_a + 3 C_b) / 2`.
    pub fn transaction_cost(&self) -> f64 {
        0.5 * (self.admin_cost + 3.0 * self.bargaining_cost)
    }

    /// Default High/Low cutoffs `(theta_a, theta_b)`, both `P_C / 2`.
    pub fn default_thresholds(&self) -> (f64, f64) {
        let t = 0.5 * self.expectation_benefit();
        (t, t)
    }
}

/// The reasonable bargain split into its benefit and cost components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BargainDecomposition {
    #[serde(rename = "R_B")]
    pub reasonable_bargain: f64,
    #[serde(rename = "P_C")]
    pub expectation_benefit: f64,
    #[serde(rename = "L_C")]
    pub transaction_cost: f64,
}

impl BargainDecomposition {
    /// Costs exceed the expected benefit. The value is reported as is, never clamped.
    pub fn is_negative(&self) -> bool {
        self.reasonable_bargain < 0.0
    }
}

/// `R_B = (p W_B + S_B)/2 - (C_a + 3 C_b)/2`.
pub fn reasonable_bargain(c: &CaseParameters) -> Result<BargainDecomposition> {
    c.validate()?;
    let expectation_benefit = c.expectation_benefit();
    let transaction_cost = c.transaction_cost();
    Ok(BargainDecomposition {
        reasonable_bargain: expectation_benefit - transaction_cost,
        expectation_benefit,
        transaction_cost,
    })
}

/// High/Low labelling of the two transaction-cost parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CostRegime {
    #[serde(rename = "HighCb_HighCa")]
    HighCbHighCa,
    #[serde(rename = "HighCb_LowCa")]
    HighCbLowCa,
    #[serde(rename = "LowCb_HighCa")]
    LowCbHighCa,
    #[serde(rename = "LowCb_LowCa")]
    LowCbLowCa,
}

impl CostRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            CostRegime::HighCbHighCa => "HighCb_HighCa",
            CostRegime::HighCbLowCa => "HighCb_LowCa",
            CostRegime::LowCbHighCa => "LowCb_HighCa",
            CostRegime::LowCbLowCa => "LowCb_LowCa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    Trial,
    Settle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioLabel {
    pub label: CostRegime,
    pub decision: Decision,
}

/// Classify a case into one of the four cost regimes and the plaintiff's choice.
///
/// Only `LowCb_HighCa` can settle, and only when the expectation at trial net of `C_a`
/// falls strictly below the settlement net of `C_b`.
pub fn classify_scenario(c: &CaseParameters, theta_a: f64, theta_b: f64) -> Result<ScenarioLabel> {
    c.validate()?;
    check_positive("theta_a", theta_a)?;
    check_positive("theta_b", theta_b)?;

    let high_a = c.admin_cost >= theta_a;
    let high_b = c.bargaining_cost >= theta_b;
    let label = match (high_b, high_a) {
        (true, true) => CostRegime::HighCbHighCa,
        (true, false) => CostRegime::HighCbLowCa,
        (false, true) => CostRegime::LowCbHighCa,
        (false, false) => CostRegime::LowCbLowCa,
    };
    let settles = label == CostRegime::LowCbHighCa
        && c.expected_judgment() - c.admin_cost < c.settlement_benefit - c.bargaining_cost;
    let decision = if settles {
        Decision::Settle
    } else {
        Decision::Trial
    };
    Ok(ScenarioLabel { label, decision })
}

/// Learned Hand negligence inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandRuleInputs {
    /// Investment in precaution `B`.
    pub precaution: f64,
    /// Probability of harm `P`.
    pub harm_probability: f64,
    /// Magnitude of harm `L`.
    pub harm_magnitude: f64,
}

/// Liable iff `P * L > B`.
pub fn hand_liability(h: &HandRuleInputs) -> Result<bool> {
    check_nonneg("B_prec", h.precaution)?;
    check_unit("P_harm", h.harm_probability)?;
    check_nonneg("L_harm", h.harm_magnitude)?;
    Ok(h.harm_probability * h.harm_magnitude > h.precaution)
}

/// Cooperation requires `WTA <= WTP`.
pub fn cooperation_possible(wta: f64, wtp: f64) -> Result<bool> {
    check_finite("wta", wta)?;
    check_finite("wtp", wtp)?;
    Ok(wta <= wtp)
}

/// Threat-point willingness values.
///
/// The plaintiff accepts anything above the expected judgment net of their share of
/// trial costs; the defendant pays up to the expected judgment plus their share.
pub fn derive_wta_wtp(
    c: &CaseParameters,
    plaintiff_cost_share: f64,
    defendant_cost_share: f64,
) -> Result<(f64, f64)> {
    c.validate()?;
    check_unit("plaintiff_cost_share", plaintiff_cost_share)?;
    check_unit("defendant_cost_share", defendant_cost_share)?;
    let ej = c.expected_judgment();
    Ok((
        ej - plaintiff_cost_share * c.admin_cost,
        ej + defendant_cost_share * c.admin_cost,
    ))
}
