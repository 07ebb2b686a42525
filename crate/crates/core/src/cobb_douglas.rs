//! Cobb-Douglas utility over the transaction-cost component and the bargain.
//!
//! The problem is
//!
//! ```text
//! max  U(L_C, R_B) = L_C^alpha * R_B^beta
//! s.t. p1 * L_C + p2 * R_B <= P_C
//! ```
//!
//! With `alpha, beta > 0` the optimum is interior and the budget binds, so the closed-form
//! demands, the shadow price and the identity `U* = lambda / (alpha + beta) * P_C` follow
//! from the Lagrangian first-order conditions.

use serde::{Deserialize, Serialize};

use crate::error::{check_nonneg, check_positive};
use crate::{rel_diff, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CobbDouglasProblem {
    /// Exponent on `L_C`.
    pub alpha: f64,
    /// Exponent on `R_B`.
    pub beta: f64,
    /// Price factor on `L_C`.
    pub p1: f64,
    /// Price factor on `R_B`.
    pub p2: f64,
    /// Budget `P_C`.
    #[serde(rename = "P_C")]
    pub budget: f64,
}

impl CobbDouglasProblem {
    pub fn new(alpha: f64, beta: f64, p1: f64, p2: f64, budget: f64) -> Result<Self> {
        let prob = CobbDouglasProblem {
            alpha,
            beta,
            p1,
            p2,
            budget,
        };
        prob.validate()?;
        Ok(prob)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("alpha", self.alpha)?;
        check_positive("beta", self.beta)?;
        check_positive("p1", self.p1)?;
        check_positive("p2", self.p2)?;
        check_positive("P_C", self.budget)?;
        Ok(())
    }

    /// `alpha + beta`, the degree of homogeneity.
    pub fn returns_to_scale(&self) -> f64 {
        self.alpha + self.beta
    }

    /// Same problem with a different budget.
    pub fn with_budget(&self, budget: f64) -> Self {
        CobbDouglasProblem { budget, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumSolution {
    #[serde(rename = "L_C_star")]
    pub l_c_star: f64,
    #[serde(rename = "R_B_star")]
    pub r_b_star: f64,
    pub lambda: f64,
    #[serde(rename = "U_star")]
    pub u_star: f64,
    pub kkt_ok: bool,
    /// `|U* - lambda/(alpha+beta) * P_C| / U*`.
    pub identity_residual: f64,
}

/// `L_C^alpha * R_B^beta`, zero when either argument is zero.
pub fn utility(prob: &CobbDouglasProblem, l_c: f64, r_b: f64) -> Result<f64> {
    check_nonneg("L_C", l_c)?;
    check_nonneg("R_B", r_b)?;
    Ok(eval_utility(prob, l_c, r_b))
}

#[inline]
pub(crate) fn eval_utility(prob: &CobbDouglasProblem, l_c: f64, r_b: f64) -> f64 {
    if l_c == 0.0 || r_b == 0.0 {
        return 0.0;
    }
    l_c.powf(prob.alpha) * r_b.powf(prob.beta)
}

/// Analytic partials `(dU/dL_C, dU/dR_B)` at a strictly positive point.
pub fn gradient(prob: &CobbDouglasProblem, l_c: f64, r_b: f64) -> Result<[f64; 2]> {
    check_positive("L_C", l_c)?;
    check_positive("R_B", r_b)?;
    Ok(eval_gradient(prob, l_c, r_b))
}

#[inline]
fn eval_gradient(prob: &CobbDouglasProblem, l_c: f64, r_b: f64) -> [f64; 2] {
    let (a, b) = (prob.alpha, prob.beta);
    [
        a * l_c.powf(a - 1.0) * r_b.powf(b),
        b * l_c.powf(a) * r_b.powf(b - 1.0),
    ]
}

/// Marginal rate of substitution `alpha R_B / (beta L_C)`.
pub fn mrs(prob: &CobbDouglasProblem, l_c: f64, r_b: f64) -> Result<f64> {
    if l_c == 0.0 {
        return Err(Error::Domain(
            "marginal rate of substitution is undefined at L_C = 0".into(),
        ));
    }
    Ok(prob.alpha * r_b / (prob.beta * l_c))
}

/// Closed-form optimum from the tangency `MRS = p1/p2` and the binding budget.
pub fn solve_closed_form(prob: &CobbDouglasProblem) -> Result<OptimumSolution> {
    prob.validate()?;
    let (a, b) = (prob.alpha, prob.beta);
    let total = prob.returns_to_scale();

    let l_c_star = a * prob.budget / (total * prob.p1);
    let r_b_star = b * prob.budget / (total * prob.p2);
    // Shadow price from the L_C first-order condition; the R_B condition is a cross-check
    // exposed through `first_order_residuals`.
    let lambda = a * l_c_star.powf(a - 1.0) * r_b_star.powf(b) / prob.p1;
    let u_star = eval_utility(prob, l_c_star, r_b_star);
    let identity_residual = (u_star - lambda / total * prob.budget).abs() / u_star;

    Ok(OptimumSolution {
        l_c_star,
        r_b_star,
        lambda,
        u_star,
        kkt_ok: lambda > 0.0,
        identity_residual,
    })
}

/// Residuals of the Lagrangian stationarity conditions at `sol`:
/// `(dU/dL_C - lambda p1, dU/dR_B - lambda p2, P_C - p1 L_C - p2 R_B)`.
pub fn first_order_residuals(
    prob: &CobbDouglasProblem,
    sol: &OptimumSolution,
) -> Result<(f64, f64, f64)> {
    let [du_dl, du_dr] = gradient(prob, sol.l_c_star, sol.r_b_star)?;
    Ok((
        du_dl - sol.lambda * prob.p1,
        du_dr - sol.lambda * prob.p2,
        prob.budget - prob.p1 * sol.l_c_star - prob.p2 * sol.r_b_star,
    ))
}

/// Scale-free version of [`first_order_residuals`]: each residual is divided by the
/// magnitude of the terms it compares.
pub fn relative_first_order_residuals(
    prob: &CobbDouglasProblem,
    sol: &OptimumSolution,
) -> Result<[f64; 3]> {
    let [du_dl, du_dr] = gradient(prob, sol.l_c_star, sol.r_b_star)?;
    let spent = prob.p1 * sol.l_c_star + prob.p2 * sol.r_b_star;
    Ok([
        rel_diff(du_dl, sol.lambda * prob.p1),
        rel_diff(du_dr, sol.lambda * prob.p2),
        rel_diff(prob.budget, spent),
    ])
}
