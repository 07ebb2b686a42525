//! Optimal transaction cost model for two-party legal disputes.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: dispute primitives, the reasonable bargain and the intro decision rules
//!   (scenario classification, Hand rule, WTA/WTP cooperation).
//! - [`cobb_douglas`]: constrained Cobb-Douglas maximisation over the transaction-cost
//!   component `L_C` and the bargain `R_B`, with closed-form demands and shadow price.
//! - [`hessian`]: bordered Hessian second-order checks in both the shadow-price and the
//!   direct-derivative forms.
//! - [`cost_schedule`]: piecewise transaction-cost schedule `phi` with optional fixed cost.
//! - [`alpha_search`]: scan over the `L_C` exponent for the optimal transaction cost.
//! - [`compliance`]: allowed strategy subsets and the minimal penalty making compliance dominant.
//! - [`oracle`]: brute-force grid search, Leibniz determinants and finite differences used to
//!   validate the closed forms.
//! - [`sim`]: deterministic litigation-market simulator and administration-cost sweep.
//! - [`table`]: small CSV table writer shared by the sweep and the CLI.

pub mod alpha_search;
pub mod cobb_douglas;
pub mod compliance;
pub mod cost_schedule;
mod error;
pub mod hessian;
pub mod model;
pub mod oracle;
pub mod sim;
pub mod table;

pub use error::{Error, Result};

/// Relative difference `|a - b| / max(|a|, |b|, 1e-300)`.
pub(crate) fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(1e-300);
    (a - b).abs() / scale
}
