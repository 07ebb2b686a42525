//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero if any fail.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lexopt::alpha_search::{final_utility, search_alpha, AlphaSearchConfig};
use lexopt::cobb_douglas::{
    gradient, mrs, relative_first_order_residuals, solve_closed_form, utility, CobbDouglasProblem,
};
use lexopt::compliance::{
    best_overall, dominates_with_margin, min_compliance_penalty, StrategyGame,
};
use lexopt::cost_schedule::{admissible, phi_component, phi_total, CostSchedule, RatePair};
use lexopt::hessian::{build_bordered_hessian, CrossTerms, HessianVariant, SecondOrder};
use lexopt::oracle::{
    finite_diff_gradient, grid_max_on_budget, leibniz_determinant, FieldDomain, GridSpec,
};
use lexopt::sim::{self, default_admin_cost_grid, sweep_admin_cost, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x1e60;
const N_PROBLEMS: usize = 1000;

// Pinned tolerances.
const ORACLE_REL: f64 = 1e-6;
const ORACLE_EXCESS_REL: f64 = 1e-9;
const ORACLE_BUDGET: Duration = Duration::from_secs(30);
const IDENTITY_TOL: f64 = 1e-9;
const MRS_TOL: f64 = 1e-9;
const BUDGET_TOL: f64 = 1e-12;
const FOC_TOL: f64 = 1e-9;
const DET_MATCH_REL: f64 = 1e-12;
const PHI_HOMOGENEITY_REL: f64 = 1e-12;
const FINAL_UTILITY_REL: f64 = 1e-9;
const N_GAMES: usize = 500;
const SIM_BUDGET: Duration = Duration::from_secs(10);
const GRADIENT_REL: f64 = 1e-5;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn random_problem(rng: &mut ChaCha8Rng) -> CobbDouglasProblem {
    CobbDouglasProblem::new(
        rng.gen_range(0.1..3.0),
        rng.gen_range(0.1..3.0),
        rng.gen_range(0.1..10.0),
        rng.gen_range(0.1..10.0),
        rng.gen_range(0.5..100.0),
    )
    .unwrap()
}

fn problems() -> Vec<CobbDouglasProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..N_PROBLEMS).map(|_| random_problem(&mut rng)).collect()
}

fn closed_form_vs_oracle() -> Outcome {
    let start = Instant::now();
    let spec = GridSpec::budget_line(10_000);
    let (mut worst_gap, mut worst_excess) = (0.0f64, f64::NEG_INFINITY);
    for prob in problems() {
        let sol = solve_closed_form(&prob).map_err(|e| e.to_string())?;
        let grid = grid_max_on_budget(&prob, &spec).map_err(|e| e.to_string())?;
        let gap = rel(grid.utility, sol.u_star);
        let excess = (grid.utility - sol.u_star) / sol.u_star;
        worst_gap = worst_gap.max(gap);
        worst_excess = worst_excess.max(excess);
        if gap > ORACLE_REL || excess > ORACLE_EXCESS_REL {
            return Err(format!(
                "{prob:?}: grid {} vs closed form {}",
                grid.utility, sol.u_star
            ));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > ORACLE_BUDGET {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "max rel gap {worst_gap:.2e}, max rel excess {worst_excess:.2e}, {elapsed:.2?}"
    ))
}

fn identity_suite() -> Outcome {
    let mut worst = [0.0f64; 4];
    for prob in problems() {
        let sol = solve_closed_form(&prob).map_err(|e| e.to_string())?;
        let m = mrs(&prob, sol.l_c_star, sol.r_b_star).map_err(|e| e.to_string())?;
        let [f1, f2, budget] =
            relative_first_order_residuals(&prob, &sol).map_err(|e| e.to_string())?;
        let got = [
            sol.identity_residual,
            rel(m, prob.p1 / prob.p2),
            budget,
            f1.max(f2),
        ];
        let tol = [IDENTITY_TOL, MRS_TOL, BUDGET_TOL, FOC_TOL];
        for i in 0..4 {
            worst[i] = worst[i].max(got[i]);
            if got[i] > tol[i] {
                return Err(format!("{prob:?}: check {i} = {:e}", got[i]));
            }
        }
    }
    Ok(format!(
        "identity {:.1e}, mrs {:.1e}, budget {:.1e}, foc {:.1e}",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

fn worked_example() -> Outcome {
    let prob = CobbDouglasProblem::new(2.0, 1.0, 1.0, 1.0, 6.0).unwrap();
    let sol = solve_closed_form(&prob).map_err(|e| e.to_string())?;
    let got = (sol.l_c_star, sol.r_b_star, sol.lambda, sol.u_star);
    if got != (4.0, 2.0, 16.0, 32.0) {
        return Err(format!("got {got:?}"));
    }
    // Independent route: the utility evaluated at the returned point, and the
    // Lagrangian identity lambda/(alpha+beta) * P_C.
    let direct = utility(&prob, sol.l_c_star, sol.r_b_star).map_err(|e| e.to_string())?;
    let identity = sol.lambda / (prob.alpha + prob.beta) * prob.budget;
    if direct != 32.0 || identity != 32.0 {
        return Err(format!("U(L*, R*) = {direct}, identity = {identity}"));
    }
    Ok("L_C*=4 R_B*=2 lambda=16 U*=32 identity=32".into())
}

fn hessian_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let mut worst_det = 0.0f64;
    for _ in 0..N_PROBLEMS {
        let prob = CobbDouglasProblem::new(
            rng.gen_range(0.01..0.99),
            rng.gen_range(0.01..0.99),
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.5..100.0),
        )
        .unwrap();
        let sol = solve_closed_form(&prob).map_err(|e| e.to_string())?;
        let k = 10f64.powf(rng.gen_range(-6.0..6.0));
        for cross in [CrossTerms::Printed, CrossTerms::Exact] {
            for v in HessianVariant::ALL {
                let h = build_bordered_hessian(&prob, &sol, v, cross).map_err(|e| e.to_string())?;
                let det = h.determinant();
                if h.classify() != SecondOrder::LocalMax || !(det > 0.0) {
                    return Err(format!("{prob:?} {v:?} {cross:?}: det {det}"));
                }
                let d = rel(det, leibniz_determinant(&h.entries));
                worst_det = worst_det.max(d);
                if d > DET_MATCH_REL {
                    return Err(format!("{prob:?} {v:?}: cofactor vs Leibniz {d:e}"));
                }
                if h.scale_border(k).classify() != SecondOrder::LocalMax {
                    return Err(format!(
                        "{prob:?} {v:?}: border scaling by {k:e} flipped the class"
                    ));
                }
            }
        }
    }
    Ok(format!(
        "{N_PROBLEMS} draws, max cofactor/Leibniz rel diff {worst_det:.1e}"
    ))
}

/// `(C_b_fixed, alpha_plus, alpha_minus, L, with_fixed, expected)`.
const PHI_TABLE: [(f64, f64, f64, f64, bool, f64); 50] = [
    (0.0, 3.0, 1.0, -8.0, true, 8.0),
    (0.0, 3.0, 1.0, -1.0, true, 1.0),
    (0.0, 3.0, 1.0, -1e-12, true, 1e-12),
    (0.0, 3.0, 1.0, 0.0, true, 0.0),
    (0.0, 3.0, 1.0, 1e-12, true, 3e-12),
    (0.0, 3.0, 1.0, 1.0, true, 3.0),
    (0.0, 3.0, 1.0, 8.0, true, 24.0),
    (0.0, 0.5, 2.0, -8.0, true, 16.0),
    (0.0, 0.5, 2.0, -1.0, true, 2.0),
    (0.0, 0.5, 2.0, -1e-12, true, 2e-12),
    (0.0, 0.5, 2.0, 0.0, true, 0.0),
    (0.0, 0.5, 2.0, 1e-12, true, 5e-13),
    (0.0, 0.5, 2.0, 1.0, true, 0.5),
    (0.0, 0.5, 2.0, 8.0, true, 4.0),
    (2.0, 3.0, 1.0, -8.0, true, 10.0),
    (2.0, 3.0, 1.0, -8.0, false, 8.0),
    (2.0, 3.0, 1.0, -1.0, true, 3.0),
    (2.0, 3.0, 1.0, -1.0, false, 1.0),
    (2.0, 3.0, 1.0, -0.25, true, 2.25),
    (2.0, 3.0, 1.0, -0.25, false, 0.25),
    (2.0, 3.0, 1.0, -1e-12, true, 2.000000000001),
    (2.0, 3.0, 1.0, -1e-12, false, 1e-12),
    (2.0, 3.0, 1.0, 0.0, true, 0.0),
    (2.0, 3.0, 1.0, 0.0, false, 0.0),
    (2.0, 3.0, 1.0, 1e-12, true, 2.000000000003),
    (2.0, 3.0, 1.0, 1e-12, false, 3e-12),
    (2.0, 3.0, 1.0, 0.25, true, 2.75),
    (2.0, 3.0, 1.0, 0.25, false, 0.75),
    (2.0, 3.0, 1.0, 1.0, true, 5.0),
    (2.0, 3.0, 1.0, 1.0, false, 3.0),
    (2.0, 3.0, 1.0, 8.0, true, 26.0),
    (2.0, 3.0, 1.0, 8.0, false, 24.0),
    (2.0, 0.5, 2.0, -8.0, true, 18.0),
    (2.0, 0.5, 2.0, -8.0, false, 16.0),
    (2.0, 0.5, 2.0, -1.0, true, 4.0),
    (2.0, 0.5, 2.0, -1.0, false, 2.0),
    (2.0, 0.5, 2.0, -0.25, true, 2.5),
    (2.0, 0.5, 2.0, -0.25, false, 0.5),
    (2.0, 0.5, 2.0, -1e-12, true, 2.000000000002),
    (2.0, 0.5, 2.0, -1e-12, false, 2e-12),
    (2.0, 0.5, 2.0, 0.0, true, 0.0),
    (2.0, 0.5, 2.0, 0.0, false, 0.0),
    (2.0, 0.5, 2.0, 1e-12, true, 2.0000000000005),
    (2.0, 0.5, 2.0, 1e-12, false, 5e-13),
    (2.0, 0.5, 2.0, 0.25, true, 2.125),
    (2.0, 0.5, 2.0, 0.25, false, 0.125),
    (2.0, 0.5, 2.0, 1.0, true, 2.5),
    (2.0, 0.5, 2.0, 1.0, false, 0.5),
    (2.0, 0.5, 2.0, 8.0, true, 6.0),
    (2.0, 0.5, 2.0, 8.0, false, 4.0),
];

fn phi_suite() -> Outcome {
    for &(fixed, ap, am, l, with_fixed, expected) in &PHI_TABLE {
        let s = CostSchedule::uniform(fixed, ap, am, 1).map_err(|e| e.to_string())?;
        let got = phi_component(&s, 0, l, with_fixed).map_err(|e| e.to_string())?;
        if rel(got, expected) > 1e-15 {
            return Err(format!(
                "phi({l}) with C_b={fixed}, rates ({ap}, {am}): {got} != {expected}"
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let mut worst = 0.0f64;
    for _ in 0..N_PROBLEMS {
        let n = rng.gen_range(1..8);
        let rates = (0..n)
            .map(|_| RatePair {
                alpha_plus: rng.gen_range(0.0..5.0),
                alpha_minus: rng.gen_range(0.0..5.0),
            })
            .collect();
        let s = CostSchedule::new(rng.gen_range(0.0..10.0), rates).unwrap();
        let l: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let k = rng.gen_range(0.01..100.0);
        let kl: Vec<f64> = l.iter().map(|x| k * x).collect();
        let lhs = phi_total(&s, &kl, false).unwrap();
        let rhs = k * phi_total(&s, &l, false).unwrap();
        let d = if lhs == rhs { 0.0 } else { rel(lhs, rhs) };
        worst = worst.max(d);
        if d > PHI_HOMOGENEITY_REL {
            return Err(format!("phi(kL) = {lhs}, k phi(L) = {rhs}"));
        }
    }

    // Strict bounds: phi = 44 exactly against R_B = 44, and phi = 0.
    let s = CostSchedule::uniform(4.0, 10.0, 10.0, 1).unwrap();
    let cases = [
        (4.0, 44.0, false),
        (4.0, 44.000001, true),
        (0.0, 44.0, false),
        (4.0, 45.0, true),
    ];
    for (l, r_b, want) in cases {
        if admissible(&s, &[l], r_b).unwrap() != want {
            return Err(format!("admissible(L={l}, R_B={r_b}) != {want}"));
        }
    }
    Ok(format!(
        "50-row table exact, homogeneity max rel {worst:.1e}, strict bounds"
    ))
}

fn alpha_search_suite() -> Outcome {
    let grid: Vec<f64> = (1..=9).map(|i| f64::from(i) / 10.0).collect();
    let cfg = AlphaSearchConfig::new(grid.clone(), 0.5, 1.0, 1.0, 2.0);
    let res = search_alpha(&cfg).map_err(|e| e.to_string())?;
    if res.admissible().count() != grid.len() {
        return Err(format!(
            "{} of {} admissible",
            res.admissible().count(),
            grid.len()
        ));
    }
    if search_alpha(&cfg).map_err(|e| e.to_string())? != res {
        return Err("search is not deterministic".into());
    }

    // Oracle: U* from the demand functions directly, first maximum wins.
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for &a in &grid {
        let (b, pc) = (0.5, 2.0);
        let u = (a * pc / (a + b)).powf(a) * (b * pc / (a + b)).powf(b);
        if u > best.1 {
            best = (a, u);
        }
    }
    let star = res.alpha_star.ok_or("no alpha_star")?;
    if star != best.0 {
        return Err(format!("alpha_star {star} but oracle argmax {}", best.0));
    }
    if rel(res.selected().unwrap().solution.u_star, best.1) > 1e-12 {
        return Err("selected U* disagrees with oracle".into());
    }

    let mut worst = 0.0f64;
    for c in &res.candidates {
        let s = &c.solution;
        let fu =
            final_utility(s, c.alpha, 0.5, s.l_c_star, s.r_b_star).map_err(|e| e.to_string())?;
        worst = worst.max(rel(fu, s.u_star));
        if rel(fu, s.u_star) > FINAL_UTILITY_REL {
            return Err(format!(
                "alpha {}: final_utility {fu} vs U* {}",
                c.alpha, s.u_star
            ));
        }
    }
    Ok(format!(
        "9/9 admissible, alpha_star={star}, final_utility max rel {worst:.1e}"
    ))
}

fn random_game(rng: &mut ChaCha8Rng) -> StrategyGame {
    let n = rng.gen_range(2..=20);
    let names: Vec<String> = (0..n).map(|i| format!("s{i:02}")).collect();
    let mut allowed: std::collections::BTreeSet<String> = names
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .cloned()
        .collect();
    allowed.insert(names[0].clone());
    allowed.remove(&names[n - 1]);
    let utilities = names
        .into_iter()
        .map(|s| (s, rng.gen_range(-100.0..100.0)))
        .collect();
    StrategyGame::new(utilities, allowed).unwrap()
}

fn compliance_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut positive = 0;
    for _ in 0..N_GAMES {
        let g = random_game(&mut rng);
        let m = g.default_margin();
        let tau = min_compliance_penalty(&g, m).map_err(|e| e.to_string())?;
        let (winner, _) = best_overall(&g.with_penalty(tau));
        if !g.allowed.contains(&winner) {
            return Err(format!("post-penalty argmax {winner} outside P(r)"));
        }
        if !dominates_with_margin(&g, tau, m) {
            return Err("tau does not give margin dominance".into());
        }
        if tau > 0.0 {
            positive += 1;
            // Margin reading.
            if dominates_with_margin(&g, tau - m / 2.0, m) {
                return Err(format!("tau - m/2 still dominates (tau = {tau})"));
            }
            // Strict reading: going past the margin hands the argmax to a disallowed strategy.
            let (w, _) = best_overall(&g.with_penalty(tau - 1.5 * m));
            if g.allowed.contains(&w) {
                return Err(format!("tau - 3m/2 still keeps {w} on top"));
            }
        }
    }
    Ok(format!("{N_GAMES} games, {positive} with tau > 0"))
}

fn simulator_suite() -> Outcome {
    let cfg = SimConfig::default();
    let grid = default_admin_cost_grid();
    let start = Instant::now();
    let a = sweep_admin_cost(&cfg, &grid).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let b = sweep_admin_cost(&cfg, &grid).map_err(|e| e.to_string())?;
    if grid.len() != 20 || a.rows.len() != 20 {
        return Err("expected a 20-point sweep".into());
    }
    if elapsed > SIM_BUDGET {
        return Err(format!("default sweep took {elapsed:?}"));
    }
    if a.table().to_csv_string(&[]) != b.table().to_csv_string(&[]) {
        return Err("sweep CSV differs between identical runs".into());
    }

    let (theta_a, theta_b) = cfg.thresholds();
    for r in a.rows.iter().filter(|r| r.admin_cost < theta_a) {
        if r.settlement_rate != 0.0 {
            return Err(format!(
                "C_a = {} < theta_a but settlement_rate {}",
                r.admin_cost, r.settlement_rate
            ));
        }
    }

    for &c_a in &grid {
        let cell = SimConfig {
            admin_cost_policy: c_a,
            ..cfg.clone()
        };
        for s in sim::run(&cell).map_err(|e| e.to_string())? {
            if s.settlements + s.trials != s.filings {
                return Err(format!(
                    "C_a = {c_a}, tick {}: counters not conserved",
                    s.tick
                ));
            }
        }
    }

    let with_cb = |c_b: f64| {
        let mut c = SimConfig {
            theta_a: Some(theta_a),
            theta_b: Some(theta_b),
            ..cfg.clone()
        };
        c.case_params_template.bargaining_cost = c_b;
        sweep_admin_cost(&c, &grid)
    };
    let below = with_cb(theta_b - 1.0).map_err(|e| e.to_string())?;
    let above = with_cb(theta_b + 1.0).map_err(|e| e.to_string())?;
    if !below.rows.iter().any(|r| r.settlement_rate > 0.0) {
        return Err("no settlements with C_b below theta_b".into());
    }
    if let Some(r) = above.rows.iter().find(|r| r.settlement_rate != 0.0) {
        return Err(format!(
            "C_b above theta_b still settles at C_a = {}",
            r.admin_cost
        ));
    }
    Ok(format!(
        "byte-identical, conserved, theta_a={theta_a}, theta_b={theta_b}, sweep {elapsed:.2?}"
    ))
}

fn gradient_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let prob = random_problem(&mut rng);
        let (l, r): (f64, f64) = (rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0));
        let h = 1e-5 * l.min(r);
        let f = |x: &[f64]| utility(&prob, x[0], x[1]).unwrap();
        let fd = finite_diff_gradient(f, &[l, r], h, FieldDomain::PositiveOrthant)
            .map_err(|e| e.to_string())?;
        let an = gradient(&prob, l, r).map_err(|e| e.to_string())?;
        for i in 0..2 {
            let d = rel(an[i], fd[i]);
            worst = worst.max(d);
            if d > GRADIENT_REL {
                return Err(format!(
                    "{prob:?} at ({l}, {r}): analytic {} vs fd {}",
                    an[i], fd[i]
                ));
            }
        }
    }
    Ok(format!("100 points, max rel diff {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("closed form vs grid oracle", closed_form_vs_oracle),
        ("identity suite", identity_suite),
        ("worked example", worked_example),
        ("hessian suite", hessian_suite),
        ("phi suite", phi_suite),
        ("alpha search", alpha_search_suite),
        ("compliance", compliance_suite),
        ("simulator determinism and structure", simulator_suite),
        ("gradient checks", gradient_suite),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
