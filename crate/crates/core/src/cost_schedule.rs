//! Piecewise transaction-cost schedule.
//!
//! Each cost component `i` is charged in proportion to its signed intensity `L_i`, at rate
//! `alpha_i^+` above zero and `alpha_i^-` below it. With the fixed part switched on a
//! nonzero intensity also pays the fixed bargaining cost `C_b`, while `L_i = 0` stays free.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_nonneg};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatePair {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSchedule {
    #[serde(rename = "C_b_fixed")]
    pub fixed_cost: f64,
    pub rates: Vec<RatePair>,
}

impl CostSchedule {
    pub fn new(fixed_cost: f64, rates: Vec<RatePair>) -> Result<Self> {
        let s = CostSchedule { fixed_cost, rates };
        s.validate()?;
        Ok(s)
    }

    /// Same `(alpha_plus, alpha_minus)` for every one of `n` components.
    pub fn uniform(fixed_cost: f64, alpha_plus: f64, alpha_minus: f64, n: usize) -> Result<Self> {
        Self::new(
            fixed_cost,
            vec![
                RatePair {
                    alpha_plus,
                    alpha_minus
                };
                n
            ],
        )
    }

    pub fn validate(&self) -> Result<()> {
        check_nonneg("C_b_fixed", self.fixed_cost)?;
        if self.rates.is_empty() {
            return Err(Error::invalid(
                "rates",
                "at least one cost component is required",
            ));
        }
        for r in &self.rates {
            check_nonneg("alpha_plus", r.alpha_plus)?;
            check_nonneg("alpha_minus", r.alpha_minus)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    fn check_len(&self, intensities: &[f64]) -> Result<()> {
        if intensities.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: intensities.len(),
            });
        }
        Ok(())
    }
}

/// `phi_i(L_i)` for one component.
pub fn phi_component(s: &CostSchedule, i: usize, intensity: f64, with_fixed: bool) -> Result<f64> {
    let rate = s.rates.get(i).ok_or(Error::IndexOutOfRange {
        index: i,
        len: s.len(),
    })?;
    check_finite("L_i", intensity)?;
    Ok(eval_component(s.fixed_cost, rate, intensity, with_fixed))
}

#[inline]
fn eval_component(fixed: f64, rate: &RatePair, l: f64, with_fixed: bool) -> f64 {
    let variable = if l > 0.0 {
        rate.alpha_plus * l
    } else if l < 0.0 {
        -rate.alpha_minus * l
    } else {
        return 0.0;
    };
    if with_fixed {
        fixed + variable
    } else {
        variable
    }
}

/// Aggregate `phi(L) = sum_i phi_i(L_i)`.
pub fn phi_total(s: &CostSchedule, intensities: &[f64], with_fixed: bool) -> Result<f64> {
    s.check_len(intensities)?;
    intensities
        .iter()
        .zip(&s.rates)
        .map(|(&l, rate)| {
            check_finite("L_i", l)?;
            Ok(eval_component(s.fixed_cost, rate, l, with_fixed))
        })
        .sum()
}

/// Strict bounds `0 < phi(L) < R_B` on the aggregate schedule, fixed cost included.
pub fn admissible(s: &CostSchedule, intensities: &[f64], reasonable_bargain: f64) -> Result<bool> {
    check_finite("R_B", reasonable_bargain)?;
    let phi = phi_total(s, intensities, true)?;
    Ok(phi_within_bounds(phi, reasonable_bargain))
}

/// `0 < phi < R_B`.
pub fn phi_within_bounds(phi: f64, reasonable_bargain: f64) -> bool {
    0.0 < phi && phi < reasonable_bargain
}

/// The budget side of the schedule, `R_B + phi(L) <= P_C`.
pub fn within_budget(
    s: &CostSchedule,
    intensities: &[f64],
    reasonable_bargain: f64,
    expectation_benefit: f64,
) -> Result<bool> {
    check_finite("R_B", reasonable_bargain)?;
    check_finite("P_C", expectation_benefit)?;
    let phi = phi_total(s, intensities, true)?;
    Ok(reasonable_bargain + phi <= expectation_benefit)
}
