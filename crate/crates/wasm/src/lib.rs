//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns a JSON string. Failures come back as `{"error": "..."}` so the
//! page can show the message next to the control that caused it.

use lexopt::alpha_search::{search_alpha, AlphaSearchConfig};
use lexopt::cobb_douglas::{solve_closed_form, utility, CobbDouglasProblem};
use lexopt::hessian::{classify_second_order, CrossTerms};
use lexopt::sim::{sweep_admin_cost, SimConfig};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(r: Result<Value, lexopt::Error>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// Closed-form optimum plus `U` sampled along the budget line `p1 L + p2 R = P_C`.
#[wasm_bindgen]
pub fn solve_curve(alpha: f64, beta: f64, p1: f64, p2: f64, budget: f64, points: u32) -> String {
    respond((|| {
        let prob = CobbDouglasProblem::new(alpha, beta, p1, p2, budget)?;
        let sol = solve_closed_form(&prob)?;
        let report = classify_second_order(&prob, &sol, CrossTerms::Printed)?;
        let n = points.clamp(2, 2000);
        let l_max = budget / p1;
        let curve = (0..n)
            .map(|i| {
                let l = l_max * f64::from(i) / f64::from(n - 1);
                let r = ((budget - p1 * l) / p2).max(0.0);
                Ok([l, utility(&prob, l, r)?])
            })
            .collect::<lexopt::Result<Vec<_>>>()?;
        Ok(json!({
            "L_C_star": sol.l_c_star,
            "R_B_star": sol.r_b_star,
            "lambda": sol.lambda,
            "U_star": sol.u_star,
            "identity_residual": sol.identity_residual,
            "shadow_class": report.shadow.class,
            "direct_class": report.direct.class,
            "curve": curve,
        }))
    })())
}

/// Evaluate `steps` evenly spaced exponents in `[alpha_min, alpha_max]`.
#[wasm_bindgen]
pub fn alpha_scan(
    beta: f64,
    p1: f64,
    p2: f64,
    budget: f64,
    alpha_min: f64,
    alpha_max: f64,
    steps: u32,
) -> String {
    respond((|| {
        let n = steps.clamp(2, 500);
        let grid = (0..n)
            .map(|i| alpha_min + (alpha_max - alpha_min) * f64::from(i) / f64::from(n - 1))
            .collect();
        let res = search_alpha(&AlphaSearchConfig::new(grid, beta, p1, p2, budget))?;
        let rows: Vec<Value> = res
            .candidates
            .iter()
            .map(|c| {
                json!({
                    "alpha": c.alpha,
                    "U_star": c.solution.u_star,
                    "lambda": c.solution.lambda,
                    "det_h": c.det_h,
                    "admissible": c.admissible,
                })
            })
            .collect();
        Ok(json!({
            "alpha_star": res.alpha_star,
            "U_star_final": res.u_star_final,
            "candidates": rows,
        }))
    })())
}

/// Sweep `C_a` over `steps` points in `[0, c_a_max]` with the default simulator and the
/// given bargaining cost.
#[wasm_bindgen]
pub fn admin_cost_sweep(
    bargaining_cost: f64,
    c_a_max: f64,
    steps: u32,
    ticks: u32,
    seed: u32,
) -> String {
    respond((|| {
        let mut cfg = SimConfig {
            ticks,
            seed: u64::from(seed),
            ..SimConfig::default()
        };
        cfg.case_params_template.bargaining_cost = bargaining_cost;
        let n = steps.clamp(2, 200);
        let grid: Vec<f64> = (0..n)
            .map(|i| c_a_max * f64::from(i) / f64::from(n - 1))
            .collect();
        let table = sweep_admin_cost(&cfg, &grid)?;
        let (theta_a, theta_b) = cfg.thresholds();
        Ok(json!({
            "theta_a": theta_a,
            "theta_b": theta_b,
            "rows": table.rows,
            "best_welfare": table.best_welfare,
            "min_trials": table.min_trials,
        }))
    })())
}
