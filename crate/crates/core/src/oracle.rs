//! Brute-force checks for the closed forms.
//!
//! Nothing here is used by the production paths; the grid search, the Leibniz
//! determinant and the central differences exist so tests can validate the analytic
//! results by an independent route.

use itertools::Itertools;

use crate::cobb_douglas::{eval_utility, CobbDouglasProblem};
use crate::error::check_positive;
use crate::{Error, Result};

/// Region searched by the grid oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridDomain {
    /// Points on `p1 L_C + p2 R_B = P_C`.
    BudgetLine,
    /// A `points_per_axis x points_per_axis` grid on `[eps, P_C/p1] x [eps, P_C/p2]`,
    /// keeping only feasible points.
    Rectangle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points_per_axis: usize,
    pub domain: GridDomain,
    /// Distance kept from the zero boundary. `None` uses `1e-9 * P_C / min(p1, p2)`.
    pub clamp_epsilon: Option<f64>,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 100;

    pub fn budget_line(points_per_axis: usize) -> Self {
        GridSpec {
            points_per_axis,
            domain: GridDomain::BudgetLine,
            clamp_epsilon: None,
        }
    }

    pub fn rectangle(points_per_axis: usize) -> Self {
        GridSpec {
            points_per_axis,
            domain: GridDomain::Rectangle,
            clamp_epsilon: None,
        }
    }

    fn epsilon(&self, prob: &CobbDouglasProblem) -> Result<f64> {
        match self.clamp_epsilon {
            Some(e) => check_positive("clamp_epsilon", e),
            None => Ok(1e-9 * prob.budget / prob.p1.min(prob.p2)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub l_c: f64,
    pub r_b: f64,
    pub utility: f64,
}

/// Best utility found on the grid described by `spec`.
///
/// Ties keep the first point in index order, so the result does not depend on how the
/// evaluation is partitioned.
pub fn grid_max_on_budget(prob: &CobbDouglasProblem, spec: &GridSpec) -> Result<GridPoint> {
    prob.validate()?;
    let n = spec.points_per_axis;
    if n < GridSpec::MIN_POINTS {
        return Err(Error::invalid(
            "points_per_axis",
            format!("must be at least {}, got {n}", GridSpec::MIN_POINTS),
        ));
    }
    let eps = spec.epsilon(prob)?;
    let l_max = prob.budget / prob.p1;
    let r_max = prob.budget / prob.p2;
    if 2.0 * eps >= l_max.min(r_max) {
        return Err(Error::invalid(
            "clamp_epsilon",
            "leaves no interior to search",
        ));
    }

    let mut best = GridPoint {
        l_c: f64::NAN,
        r_b: f64::NAN,
        utility: f64::NEG_INFINITY,
    };
    let mut consider = |l_c: f64, r_b: f64| {
        let u = eval_utility(prob, l_c, r_b);
        if u > best.utility {
            best = GridPoint {
                l_c,
                r_b,
                utility: u,
            };
        }
    };

    match spec.domain {
        GridDomain::BudgetLine => {
            let lo = eps;
            let hi = l_max - eps;
            let step = (hi - lo) / (n - 1) as f64;
            for i in 0..n {
                let l_c = lo + step * i as f64;
                let r_b = (prob.budget - prob.p1 * l_c) / prob.p2;
                consider(l_c, r_b);
            }
        }
        GridDomain::Rectangle => {
            let l_step = (l_max - eps) / (n - 1) as f64;
            let r_step = (r_max - eps) / (n - 1) as f64;
            for i in 0..n {
                let l_c = eps + l_step * i as f64;
                for j in 0..n {
                    let r_b = eps + r_step * j as f64;
                    if prob.p1 * l_c + prob.p2 * r_b <= prob.budget {
                        consider(l_c, r_b);
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Spacing in `L_C` between neighbouring budget-line grid points.
pub fn budget_line_step(prob: &CobbDouglasProblem, spec: &GridSpec) -> Result<f64> {
    let eps = spec.epsilon(prob)?;
    Ok((prob.budget / prob.p1 - 2.0 * eps) / (spec.points_per_axis - 1) as f64)
}

/// Where a finite-difference stencil may be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldDomain {
    Everywhere,
    /// Every coordinate strictly positive.
    PositiveOrthant,
}

impl FieldDomain {
    fn contains(self, x: &[f64]) -> bool {
        match self {
            FieldDomain::Everywhere => x.iter().all(|v| v.is_finite()),
            FieldDomain::PositiveOrthant => x.iter().all(|v| v.is_finite() && *v > 0.0),
        }
    }
}

/// Central-difference gradient of `f` at `point` with step `h`.
pub fn finite_diff_gradient<F>(f: F, point: &[f64], h: f64, domain: FieldDomain) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    check_positive("h", h)?;
    let mut x = point.to_vec();
    let mut grad = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        x[i] = point[i] + h;
        let fwd_ok = domain.contains(&x);
        let f_plus = f(&x);
        x[i] = point[i] - h;
        let back_ok = domain.contains(&x);
        let f_minus = f(&x);
        x[i] = point[i];
        if !(fwd_ok && back_ok) {
            return Err(Error::Domain(format!(
                "stencil at coordinate {i} leaves the domain (x = {}, h = {h})",
                point[i]
            )));
        }
        grad.push((f_plus - f_minus) / (2.0 * h));
    }
    Ok(grad)
}

/// Determinant by the Leibniz permutation sum.
pub fn leibniz_determinant<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    (0..N)
        .permutations(N)
        .map(|perm| {
            let inversions = (0..N)
                .tuple_combinations()
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            sign * perm
                .iter()
                .enumerate()
                .map(|(row, &col)| m[row][col])
                .product::<f64>()
        })
        .sum()
}
