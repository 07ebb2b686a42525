//! Litigation-market simulator.
//!
//! Each tick a population of potential injurers picks a precaution level, injuries follow
//! from the harm curve, every injury is filed, and each filing is resolved by the
//! four-scenario classifier at the policy administration cost `C_a`. Settlements discount
//! the liability injurers expect, so a high settlement rate feeds back into lower
//! precaution on the next tick.
//!
//! The default mode works with expectations (`round(n * P_harm)` injuries, filings spread
//! evenly over case bins) and is fully deterministic. [`SimMode::Sampled`] draws injuries
//! and case bins from a seeded ChaCha stream instead.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_nonneg, check_positive, check_unit};
use crate::model::{classify_scenario, CaseParameters, Decision};
use crate::table::{Cell, Table};
use crate::{Error, Result};

/// Probability of causing harm as a function of precaution spending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HarmCurve {
    /// `base * exp(-B / scale)`.
    Exponential { base: f64, scale: f64 },
    /// Piecewise-linear through `(B, P)` points sorted by `B`, flat beyond the ends.
    Table { points: Vec<(f64, f64)> },
}

impl HarmCurve {
    pub fn validate(&self) -> Result<()> {
        match self {
            HarmCurve::Exponential { base, scale } => {
                check_unit("harm_probability.base", *base)?;
                check_positive("harm_probability.scale", *scale)?;
            }
            HarmCurve::Table { points } => {
                if points.is_empty() {
                    return Err(Error::invalid(
                        "harm_probability.points",
                        "must not be empty",
                    ));
                }
                for &(b, p) in points {
                    check_finite("harm_probability.points", b)?;
                    check_unit("harm_probability.points", p)?;
                }
                for w in points.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::invalid(
                            "harm_probability.points",
                            "precaution levels must be strictly increasing",
                        ));
                    }
                    if w[1].1 > w[0].1 {
                        return Err(Error::invalid(
                            "harm_probability.points",
                            "harm probability must be nonincreasing in precaution",
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, precaution: f64) -> f64 {
        match self {
            HarmCurve::Exponential { base, scale } => base * (-precaution / scale).exp(),
            HarmCurve::Table { points } => {
                let first = points[0];
                let last = points[points.len() - 1];
                if precaution <= first.0 {
                    return first.1;
                }
                if precaution >= last.0 {
                    return last.1;
                }
                let k = points.partition_point(|&(b, _)| b <= precaution);
                let (b0, p0) = points[k - 1];
                let (b1, p1) = points[k];
                p0 + (p1 - p0) * (precaution - b0) / (b1 - b0)
            }
        }
    }
}

/// Case primitives shared by every filing, minus the policy-controlled `C_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseTemplate {
    pub p: f64,
    #[serde(rename = "W_B")]
    pub win_benefit: f64,
    #[serde(rename = "S_B")]
    pub settlement_benefit: f64,
    #[serde(rename = "C_b")]
    pub bargaining_cost: f64,
}

impl CaseTemplate {
    pub fn with_admin_cost(&self, p: f64, admin_cost: f64) -> CaseParameters {
        CaseParameters {
            p,
            win_benefit: self.win_benefit,
            settlement_benefit: self.settlement_benefit,
            admin_cost,
            bargaining_cost: self.bargaining_cost,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    #[default]
    Expected,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub n_injurers: u64,
    pub precaution_cost_grid: Vec<f64>,
    pub harm_probability: HarmCurve,
    #[serde(rename = "L_harm")]
    pub harm_magnitude: f64,
    pub case_params_template: CaseTemplate,
    #[serde(rename = "C_a_policy")]
    pub admin_cost_policy: f64,
    pub settlement_liability_discount: f64,
    pub ticks: u32,
    pub seed: u64,
    /// High/Low cutoff for `C_a`; defaults to `P_C / 2` of the template.
    pub theta_a: Option<f64>,
    /// High/Low cutoff for `C_b`; defaults to `P_C / 2` of the template.
    pub theta_b: Option<f64>,
    /// Filings spread `p` uniformly over `[p - p_spread, p + p_spread]`, clamped to `[0, 1]`.
    pub p_spread: f64,
    pub case_bins: u32,
    pub mode: SimMode,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_injurers: 10_000,
            precaution_cost_grid: (0..=30).map(f64::from).collect(),
            harm_probability: HarmCurve::Exponential {
                base: 0.05,
                scale: 8.0,
            },
            harm_magnitude: 1000.0,
            case_params_template: CaseTemplate {
                p: 0.5,
                win_benefit: 200.0,
                settlement_benefit: 60.0,
                bargaining_cost: 1.0,
            },
            admin_cost_policy: 50.0,
            settlement_liability_discount: 0.8,
            ticks: 100,
            seed: 0,
            theta_a: None,
            theta_b: None,
            p_spread: 0.3,
            case_bins: 16,
            mode: SimMode::Expected,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_injurers == 0 {
            return Err(Error::invalid("n_injurers", "must be positive"));
        }
        if self.ticks == 0 {
            return Err(Error::invalid("ticks", "must be positive"));
        }
        if self.case_bins == 0 {
            return Err(Error::invalid("case_bins", "must be positive"));
        }
        if self.precaution_cost_grid.is_empty() {
            return Err(Error::invalid("precaution_cost_grid", "must not be empty"));
        }
        for &b in &self.precaution_cost_grid {
            check_nonneg("precaution_cost_grid", b)?;
        }
        self.harm_probability.validate()?;
        check_nonneg("L_harm", self.harm_magnitude)?;
        self.case_params_template
            .with_admin_cost(self.case_params_template.p, self.admin_cost_policy)
            .validate()?;
        check_unit(
            "settlement_liability_discount",
            self.settlement_liability_discount,
        )?;
        check_nonneg("p_spread", self.p_spread)?;
        let (ta, tb) = self.thresholds();
        check_positive("theta_a", ta)?;
        check_positive("theta_b", tb)?;
        Ok(())
    }

    /// Effective `(theta_a, theta_b)`.
    pub fn thresholds(&self) -> (f64, f64) {
        let (da, db) = self
            .case_params_template
            .with_admin_cost(self.case_params_template.p, self.admin_cost_policy)
            .default_thresholds();
        (self.theta_a.unwrap_or(da), self.theta_b.unwrap_or(db))
    }

    /// Win probability at the midpoint of each case bin.
    pub fn bin_probabilities(&self) -> Vec<f64> {
        let k = self.case_bins as f64;
        let lo = self.case_params_template.p - self.p_spread;
        let width = 2.0 * self.p_spread / k;
        (0..self.case_bins)
            .map(|i| (lo + (i as f64 + 0.5) * width).clamp(0.0, 1.0))
            .collect()
    }
}

/// Counters after a tick. The per-tick fields describe the last tick only.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SimState {
    pub tick: u32,
    pub precaution: f64,
    pub injuries: u64,
    pub filings: u64,
    pub settlements: u64,
    pub trials: u64,
    pub aggregate_filings: u64,
    pub aggregate_settlements: u64,
    pub aggregate_trials: u64,
    /// Settlement share of the last tick that had filings; feeds the next precaution choice.
    pub settlement_rate: f64,
    /// Welfare of the last tick.
    pub tick_welfare: f64,
    /// Cumulative welfare.
    pub welfare: f64,
}

/// Precaution minimising `B + P_harm(B) * L_harm * (1 - discount * settlement_rate)`.
/// Ties go to the smaller `B`.
pub fn choose_precaution(cfg: &SimConfig, settlement_rate: f64) -> f64 {
    let exposure = cfg.harm_magnitude * (1.0 - cfg.settlement_liability_discount * settlement_rate);
    let mut best = (f64::INFINITY, f64::INFINITY);
    for &b in &cfg.precaution_cost_grid {
        let cost = b + cfg.harm_probability.eval(b) * exposure;
        if cost < best.1 || (cost == best.1 && b < best.0) {
            best = (b, cost);
        }
    }
    best.0
}

/// Advance one tick. `rng` is only consulted in [`SimMode::Sampled`].
pub fn step(state: &SimState, cfg: &SimConfig, rng: &mut ChaCha8Rng) -> SimState {
    let precaution = choose_precaution(cfg, state.settlement_rate);
    let p_harm = cfg.harm_probability.eval(precaution).clamp(0.0, 1.0);
    let injuries = match cfg.mode {
        SimMode::Expected => (cfg.n_injurers as f64 * p_harm).round() as u64,
        SimMode::Sampled => Binomial::new(cfg.n_injurers, p_harm)
            .expect("probability clamped to [0, 1]")
            .sample(rng),
    };
    let filings = injuries;

    let bins = cfg.bin_probabilities();
    let k = bins.len() as u64;
    let mut per_bin = vec![0u64; bins.len()];
    match cfg.mode {
        SimMode::Expected => {
            for (i, n) in per_bin.iter_mut().enumerate() {
                *n = filings / k + u64::from((i as u64) < filings % k);
            }
        }
        SimMode::Sampled => {
            for _ in 0..filings {
                per_bin[rng.gen_range(0..bins.len())] += 1;
            }
        }
    }

    let (theta_a, theta_b) = cfg.thresholds();
    let t = &cfg.case_params_template;
    let mut settlements = 0u64;
    let mut trials = 0u64;
    let mut payoff = 0.0;
    let mut transaction = 0.0;
    for (&p, &n) in bins.iter().zip(&per_bin) {
        if n == 0 {
            continue;
        }
        let case = t.with_admin_cost(p, cfg.admin_cost_policy);
        let decision = classify_scenario(&case, theta_a, theta_b)
            .expect("config validated before stepping")
            .decision;
        let n_f = n as f64;
        match decision {
            Decision::Settle => {
                settlements += n;
                payoff += n_f * case.settlement_benefit;
                transaction += n_f * case.bargaining_cost;
            }
            Decision::Trial => {
                trials += n;
                payoff += n_f * case.expected_judgment();
                transaction += n_f * case.admin_cost;
            }
        }
    }

    let tick_welfare = payoff
        - cfg.n_injurers as f64 * precaution
        - injuries as f64 * cfg.harm_magnitude
        - transaction;
    let settlement_rate = if filings > 0 {
        settlements as f64 / filings as f64
    } else {
        state.settlement_rate
    };

    SimState {
        tick: state.tick + 1,
        precaution,
        injuries,
        filings,
        settlements,
        trials,
        aggregate_filings: state.aggregate_filings + filings,
        aggregate_settlements: state.aggregate_settlements + settlements,
        aggregate_trials: state.aggregate_trials + trials,
        settlement_rate,
        tick_welfare,
        welfare: state.welfare + tick_welfare,
    }
}

/// Full trajectory, one state per tick.
pub fn run(cfg: &SimConfig) -> Result<Vec<SimState>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = SimState::default();
    let mut out = Vec::with_capacity(cfg.ticks as usize);
    for _ in 0..cfg.ticks {
        state = step(&state, cfg, &mut rng);
        out.push(state);
    }
    Ok(out)
}

pub fn trajectory_table(states: &[SimState]) -> Table {
    let mut t = Table::new([
        "tick",
        "precaution",
        "injuries",
        "filings",
        "settlements",
        "trials",
        "aggregate_trials",
        "settlement_rate",
        "tick_welfare",
        "welfare",
    ]);
    for s in states {
        t.push(vec![
            u64::from(s.tick).into(),
            s.precaution.into(),
            s.injuries.into(),
            s.filings.into(),
            s.settlements.into(),
            s.trials.into(),
            s.aggregate_trials.into(),
            s.settlement_rate.into(),
            s.tick_welfare.into(),
            s.welfare.into(),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "C_a")]
    pub admin_cost: f64,
    pub aggregate_trials: u64,
    /// Settlements over filings across the whole run.
    pub settlement_rate: f64,
    pub welfare: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Row index with the highest welfare (first on ties).
    pub best_welfare: usize,
    /// Row index with the fewest aggregate trials (first on ties).
    pub min_trials: usize,
}

impl SweepTable {
    pub const HEADER: [&'static str; 4] = ["C_a", "aggregate_trials", "settlement_rate", "welfare"];

    pub fn table(&self) -> Table {
        let mut t = Table::new(Self::HEADER);
        for r in &self.rows {
            t.push(vec![
                Cell::Num(r.admin_cost),
                Cell::Int(r.aggregate_trials),
                Cell::Num(r.settlement_rate),
                Cell::Num(r.welfare),
            ]);
        }
        t
    }

    /// `#` line naming the flagged rows, for use as a CSV comment.
    pub fn flags_comment(&self) -> String {
        format!(
            "best_welfare_C_a={} min_trials_C_a={}",
            self.rows[self.best_welfare].admin_cost, self.rows[self.min_trials].admin_cost
        )
    }
}

fn sweep_cell(cfg: &SimConfig, admin_cost: f64) -> Result<SweepRow> {
    let cell = SimConfig {
        admin_cost_policy: admin_cost,
        ..cfg.clone()
    };
    let states = run(&cell)?;
    let last = states.last().expect("ticks > 0");
    let settlement_rate = if last.aggregate_filings > 0 {
        last.aggregate_settlements as f64 / last.aggregate_filings as f64
    } else {
        0.0
    };
    Ok(SweepRow {
        admin_cost,
        aggregate_trials: last.aggregate_trials,
        settlement_rate,
        welfare: last.welfare,
    })
}

/// One full run per `C_a`, all with the same seed. Rows follow grid order.
pub fn sweep_admin_cost(cfg: &SimConfig, admin_cost_grid: &[f64]) -> Result<SweepTable> {
    if admin_cost_grid.is_empty() {
        return Err(Error::invalid("C_a_grid", "must not be empty"));
    }
    for &c in admin_cost_grid {
        check_nonneg("C_a_grid", c)?;
    }
    if admin_cost_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("C_a_grid", "must be strictly increasing"));
    }
    // The thresholds must not drift with the swept C_a.
    let (ta, tb) = cfg.thresholds();
    let cfg = SimConfig {
        theta_a: Some(ta),
        theta_b: Some(tb),
        ..cfg.clone()
    };

    #[cfg(feature = "parallel")]
    let rows: Result<Vec<_>> = admin_cost_grid
        .par_iter()
        .map(|&c| sweep_cell(&cfg, c))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<_>> = admin_cost_grid
        .iter()
        .map(|&c| sweep_cell(&cfg, c))
        .collect();
    let rows = rows?;

    let mut best_welfare = 0;
    let mut min_trials = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.welfare > rows[best_welfare].welfare {
            best_welfare = i;
        }
        if r.aggregate_trials < rows[min_trials].aggregate_trials {
            min_trials = i;
        }
    }
    Ok(SweepTable {
        rows,
        best_welfare,
        min_trials,
    })
}

/// `0, 5, ..., 95`.
pub fn default_admin_cost_grid() -> Vec<f64> {
    (0..20).map(|i| 5.0 * f64::from(i)).collect()
}
