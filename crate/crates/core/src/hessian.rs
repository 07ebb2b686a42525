//! Bordered Hessian second-order checks at the Cobb-Douglas optimum.
//!
//! Two formulations are built. [`HessianVariant::ShadowForm`] writes the second-order
//! block through the shadow price and the budget, `-lambda (alpha/(alpha+beta)) P_C / L_C^2`
//! and the matching `R_B` term. [`HessianVariant::DirectForm`] differentiates the utility
//! directly, `alpha (alpha-1) L_C^(alpha-2) R_B^beta` and so on. Both carry the border
//! `-lambda p_i`. The two disagree once an exponent exceeds one, so both are reported.
//!
//! The off-diagonal second partial is zero in [`CrossTerms::Printed`] mode and the true
//! mixed partial `alpha beta L_C^(alpha-1) R_B^(beta-1)` in [`CrossTerms::Exact`] mode.

use serde::{Deserialize, Serialize};

use crate::cobb_douglas::{CobbDouglasProblem, OptimumSolution};
use crate::error::check_positive;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HessianVariant {
    ShadowForm,
    DirectForm,
}

impl HessianVariant {
    pub const ALL: [HessianVariant; 2] = [HessianVariant::ShadowForm, HessianVariant::DirectForm];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossTerms {
    /// Mixed second partial taken as zero.
    #[default]
    Printed,
    /// Mixed second partial of the Cobb-Douglas utility.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BorderedHessian {
    pub entries: [[f64; 3]; 3],
    pub variant: HessianVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SecondOrder {
    LocalMax,
    LocalMin,
    Indeterminate,
}

/// Relative size below which a determinant counts as zero.
pub const DET_TOLERANCE: f64 = 1e-10;

impl BorderedHessian {
    fn from_blocks(border: [f64; 2], diag: [f64; 2], cross: f64, variant: HessianVariant) -> Self {
        BorderedHessian {
            entries: [
                [0.0, border[0], border[1]],
                [border[0], diag[0], cross],
                [border[1], cross, diag[1]],
            ],
            variant,
        }
    }

    /// Cofactor expansion along the first row. The `(0,0)` minor drops out because the
    /// corner is zero.
    pub fn determinant(&self) -> f64 {
        let h = &self.entries;
        -h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
            + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0])
    }

    /// Largest magnitude on the border and in the second-order block.
    pub fn scale(&self) -> (f64, f64) {
        let h = &self.entries;
        let border = h[0][1].abs().max(h[0][2].abs());
        let block = [h[1][1], h[1][2], h[2][2]]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        (border, block)
    }

    /// Multiply the border row and column by `k`.
    pub fn scale_border(&self, k: f64) -> Self {
        let mut out = *self;
        for i in 1..3 {
            out.entries[0][i] *= k;
            out.entries[i][0] *= k;
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        let h = &self.entries;
        (0..3).all(|i| (0..3).all(|j| h[i][j] == h[j][i]))
    }

    /// Two choice variables, one constraint: `det > 0` is a constrained maximum and
    /// `det < 0` a minimum.
    ///
    /// The determinant is quadratic in the border and linear in the block, so
    /// `|det| <= 1e-10 * border^2 * block` is treated as zero. That threshold moves with
    /// any rescaling of the border and the class never changes under it.
    pub fn classify(&self) -> SecondOrder {
        let det = self.determinant();
        let (border, block) = self.scale();
        let tol = DET_TOLERANCE * border * border * block;
        if det.abs() <= tol {
            SecondOrder::Indeterminate
        } else if det > 0.0 {
            SecondOrder::LocalMax
        } else {
            SecondOrder::LocalMin
        }
    }
}

/// Build the bordered Hessian at `sol` for the chosen formulation.
pub fn build_bordered_hessian(
    prob: &CobbDouglasProblem,
    sol: &OptimumSolution,
    variant: HessianVariant,
    cross_terms: CrossTerms,
) -> Result<BorderedHessian> {
    prob.validate()?;
    let l = check_positive("L_C_star", sol.l_c_star)?;
    let r = check_positive("R_B_star", sol.r_b_star)?;
    let (a, b) = (prob.alpha, prob.beta);
    let lambda = sol.lambda;
    let total = prob.returns_to_scale();

    let border = [-lambda * prob.p1, -lambda * prob.p2];
    let (diag, mixed) = match variant {
        HessianVariant::ShadowForm => {
            let scaled = lambda * prob.budget / total;
            (
                [-scaled * a / (l * l), -scaled * b / (r * r)],
                scaled * a * b / (l * r),
            )
        }
        HessianVariant::DirectForm => (
            [
                a * (a - 1.0) * l.powf(a - 2.0) * r.powf(b),
                b * (b - 1.0) * l.powf(a) * r.powf(b - 2.0),
            ],
            a * b * l.powf(a - 1.0) * r.powf(b - 1.0),
        ),
    };
    let cross = match cross_terms {
        CrossTerms::Printed => 0.0,
        CrossTerms::Exact => mixed,
    };
    Ok(BorderedHessian::from_blocks(border, diag, cross, variant))
}

pub fn hessian_determinant(h: &BorderedHessian) -> f64 {
    h.determinant()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub variant: HessianVariant,
    pub det: f64,
    pub class: SecondOrder,
    pub hessian: BorderedHessian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderReport {
    pub cross_terms: CrossTerms,
    pub shadow: VariantReport,
    pub direct: VariantReport,
}

impl SecondOrderReport {
    pub fn get(&self, variant: HessianVariant) -> &VariantReport {
        match variant {
            HessianVariant::ShadowForm => &self.shadow,
            HessianVariant::DirectForm => &self.direct,
        }
    }

    pub fn variants_agree(&self) -> bool {
        self.shadow.class == self.direct.class
    }
}

/// Evaluate both formulations at `sol`.
pub fn classify_second_order(
    prob: &CobbDouglasProblem,
    sol: &OptimumSolution,
    cross_terms: CrossTerms,
) -> Result<SecondOrderReport> {
    let report = |variant| -> Result<VariantReport> {
        let hessian = build_bordered_hessian(prob, sol, variant, cross_terms)?;
        Ok(VariantReport {
            variant,
            det: hessian.determinant(),
            class: hessian.classify(),
            hessian,
        })
    };
    Ok(SecondOrderReport {
        cross_terms,
        shadow: report(HessianVariant::ShadowForm)?,
        direct: report(HessianVariant::DirectForm)?,
    })
}
