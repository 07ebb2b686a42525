//! Search over the `L_C` exponent for the optimal transaction cost.
//!
//! Every candidate `alpha` in the grid gets its own Cobb-Douglas problem with the fixed
//! `beta`, prices and budget. A candidate is admissible when the shadow price is positive,
//! `lambda / (alpha + beta) > 0`, and the bordered Hessian of the selected formulation has a
//! positive determinant. The selected `alpha*` maximises the configured objective over the
//! admissible set; its `L_C*` is the optimal transaction cost.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cobb_douglas::{solve_closed_form, CobbDouglasProblem, OptimumSolution};
use crate::error::{check_finite, check_positive};
use crate::hessian::{build_bordered_hessian, CrossTerms, HessianVariant};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Objective {
    #[default]
    MaxUtility,
    MaxLambda,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaSearchConfig {
    pub alpha_grid: Vec<f64>,
    pub beta: f64,
    pub p1: f64,
    pub p2: f64,
    #[serde(rename = "P_C")]
    pub budget: f64,
    #[serde(default)]
    pub objective: Objective,
    #[serde(default = "default_variant")]
    pub hessian_variant: HessianVariant,
    #[serde(default)]
    pub cross_terms: CrossTerms,
}

fn default_variant() -> HessianVariant {
    HessianVariant::DirectForm
}

impl AlphaSearchConfig {
    /// Config with the default objective (utility), DirectForm and printed cross terms.
    pub fn new(alpha_grid: Vec<f64>, beta: f64, p1: f64, p2: f64, budget: f64) -> Self {
        AlphaSearchConfig {
            alpha_grid,
            beta,
            p1,
            p2,
            budget,
            objective: Objective::default(),
            hessian_variant: default_variant(),
            cross_terms: CrossTerms::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha_grid.is_empty() {
            return Err(Error::invalid("alpha_grid", "must not be empty"));
        }
        for &a in &self.alpha_grid {
            check_positive("alpha_grid", a)?;
        }
        if self.alpha_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("alpha_grid", "must be strictly increasing"));
        }
        CobbDouglasProblem::new(self.alpha_grid[0], self.beta, self.p1, self.p2, self.budget)?;
        Ok(())
    }

    fn problem(&self, alpha: f64) -> CobbDouglasProblem {
        CobbDouglasProblem {
            alpha,
            beta: self.beta,
            p1: self.p1,
            p2: self.p2,
            budget: self.budget,
        }
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaCandidate {
    pub alpha: f64,
    pub solution: OptimumSolution,
    pub det_h: f64,
    /// `lambda / (alpha + beta)`.
    pub shadow_share: f64,
    pub admissible: bool,
}

impl AlphaCandidate {
    fn objective(&self, objective: Objective) -> f64 {
        match objective {
            Objective::MaxUtility => self.solution.u_star,
            Objective::MaxLambda => self.solution.lambda,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSearchResult {
    /// Every grid point in grid order, admissible or not.
    pub candidates: Vec<AlphaCandidate>,
    pub alpha_star: Option<f64>,
    #[serde(rename = "L_C_opt")]
    pub l_c_opt: Option<f64>,
    #[serde(rename = "U_star_final")]
    pub u_star_final: Option<f64>,
}

impl AlphaSearchResult {
    pub fn admissible(&self) -> impl Iterator<Item = &AlphaCandidate> {
        self.candidates.iter().filter(|c| c.admissible)
    }

    pub fn selected(&self) -> Option<&AlphaCandidate> {
        let star = self.alpha_star?;
        self.candidates.iter().find(|c| c.alpha == star)
    }
}

fn evaluate(cfg: &AlphaSearchConfig, alpha: f64) -> Result<AlphaCandidate> {
    let prob = cfg.problem(alpha);
    let solution = solve_closed_form(&prob)?;
    let hessian = build_bordered_hessian(&prob, &solution, cfg.hessian_variant, cfg.cross_terms)?;
    let det_h = hessian.determinant();
    let shadow_share = solution.lambda / (alpha + cfg.beta);
    let admissible = solution.lambda > 0.0 && shadow_share > 0.0 && det_h > 0.0;
    Ok(AlphaCandidate {
        alpha,
        solution,
        det_h,
        shadow_share,
        admissible,
    })
}

pub fn search_alpha(cfg: &AlphaSearchConfig) -> Result<AlphaSearchResult> {
    cfg.validate()?;

    // Candidates are independent; collecting an indexed iterator keeps grid order.
    #[cfg(feature = "parallel")]
    let candidates: Result<Vec<_>> = cfg
        .alpha_grid
        .par_iter()
        .map(|&a| evaluate(cfg, a))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let candidates: Result<Vec<_>> = cfg.alpha_grid.iter().map(|&a| evaluate(cfg, a)).collect();
    let candidates = candidates?;

    let best = select(&candidates, cfg.objective);
    let (alpha_star, l_c_opt, u_star_final) = match best {
        Some(c) => (
            Some(c.alpha),
            Some(c.solution.l_c_star),
            Some(final_utility(
                &c.solution,
                c.alpha,
                cfg.beta,
                c.solution.l_c_star,
                c.solution.r_b_star,
            )?),
        ),
        None => (None, None, None),
    };
    Ok(AlphaSearchResult {
        candidates,
        alpha_star,
        l_c_opt,
        u_star_final,
    })
}

/// Best admissible candidate. Only a strict improvement replaces the incumbent, so ties
/// resolve to the earliest (smallest) alpha.
fn select(candidates: &[AlphaCandidate], objective: Objective) -> Option<&AlphaCandidate> {
    let mut best: Option<&AlphaCandidate> = None;
    for c in candidates.iter().filter(|c| c.admissible) {
        if best.is_none_or(|b| c.objective(objective) > b.objective(objective)) {
            best = Some(c);
        }
    }
    best
}

/// `lambda* / (alpha* + beta) * (phi_sum + R_B)`.
///
/// `phi_sum` stands in for the transaction-cost component. With unit prices
/// `L_C* + R_B* = P_C` and this equals `U*`; otherwise the two differ.
pub fn final_utility(
    sol: &OptimumSolution,
    alpha_star: f64,
    beta: f64,
    phi_sum: f64,
    reasonable_bargain: f64,
) -> Result<f64> {
    check_finite("phi_sum", phi_sum)?;
    check_finite("R_B", reasonable_bargain)?;
    check_positive("alpha_star", alpha_star)?;
    check_positive("beta", beta)?;
    if !(sol.lambda > 0.0) {
        return Err(Error::Domain(format!(
            "shadow price must be positive, got lambda = {}",
            sol.lambda
        )));
    }
    Ok(sol.lambda / (alpha_star + beta) * (phi_sum + reasonable_bargain))
}
