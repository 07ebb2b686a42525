use lexopt::alpha_search::{final_utility, search_alpha, AlphaSearchConfig, AlphaSearchResult};
use lexopt::cobb_douglas::{
    first_order_residuals, mrs, relative_first_order_residuals, solve_closed_form,
    CobbDouglasProblem,
};
use lexopt::compliance::{best_allowed, best_overall, min_compliance_penalty, StrategyGame};
use lexopt::cost_schedule::{
    admissible, phi_component, phi_total, phi_within_bounds, within_budget, CostSchedule, RatePair,
};
use lexopt::hessian::{build_bordered_hessian, classify_second_order, CrossTerms, HessianVariant};
use lexopt::model::{
    classify_scenario, cooperation_possible, derive_wta_wtp, reasonable_bargain, CaseParameters,
};
use lexopt::sim::{self, default_admin_cost_grid, sweep_admin_cost, SimConfig};
use lexopt::table::{Cell, Table};
use lexopt::Error;
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use crate::args::CommandKind;
use crate::input::decode;
use crate::CliError;

/// What a command produced: the JSON document, and for tabular commands the CSV table
/// plus any `#` comment lines that go above it.
pub struct Output {
    pub json: Value,
    pub table: Option<(Table, Vec<String>)>,
}

impl Output {
    fn doc(json: Value) -> Self {
        Output { json, table: None }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_domain() {
            CliError::Domain(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

pub fn run(
    kind: CommandKind,
    params: Map<String, Value>,
    seed: Option<u64>,
) -> Result<Output, CliError> {
    match kind {
        CommandKind::Bargain => bargain(params),
        CommandKind::Classify => classify(params),
        CommandKind::Solve => solve(params),
        CommandKind::Hessian => hessian(params),
        CommandKind::Phi => phi(params),
        CommandKind::AlphaSearch => alpha(params),
        CommandKind::Comply => comply(params),
        CommandKind::Simulate => simulate(params, seed.expect("seed resolved for simulate")),
        CommandKind::Sweep => sweep(params, seed.expect("seed resolved for sweep")),
    }
}

/// Remove an optional extra key before the rest is decoded into a library type.
fn take<T: DeserializeOwned>(
    map: &mut Map<String, Value>,
    key: &str,
) -> Result<Option<T>, CliError> {
    match map.remove(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v)
            .map(Some)
            .map_err(|e| CliError::Input(format!("field `{key}`: {e}"))),
    }
}

fn bargain(mut map: Map<String, Value>) -> Result<Output, CliError> {
    let ps: f64 = take(&mut map, "plaintiff_cost_share")?.unwrap_or(1.0);
    let ds: f64 = take(&mut map, "defendant_cost_share")?.unwrap_or(1.0);
    let case: CaseParameters = decode(map)?;
    let d = reasonable_bargain(&case)?;
    let (wta, wtp) = derive_wta_wtp(&case, ps, ds)?;
    Ok(Output::doc(json!({
        "R_B": d.reasonable_bargain,
        "P_C": d.expectation_benefit,
        "L_C": d.transaction_cost,
        "negative": d.is_negative(),
        "WTA": wta,
        "WTP": wtp,
        "cooperation_possible": cooperation_possible(wta, wtp)?,
    })))
}

fn classify(mut map: Map<String, Value>) -> Result<Output, CliError> {
    let theta_a: Option<f64> = take(&mut map, "theta_a")?;
    let theta_b: Option<f64> = take(&mut map, "theta_b")?;
    let case: CaseParameters = decode(map)?;
    case.validate()?;
    let (da, db) = case.default_thresholds();
    let (ta, tb) = (theta_a.unwrap_or(da), theta_b.unwrap_or(db));
    let s = classify_scenario(&case, ta, tb)?;
    Ok(Output::doc(json!({
        "label": s.label,
        "decision": s.decision,
        "theta_a": ta,
        "theta_b": tb,
        "trial_net": case.expected_judgment() - case.admin_cost,
        "settle_net": case.settlement_benefit - case.bargaining_cost,
    })))
}

fn solve(mut map: Map<String, Value>) -> Result<Output, CliError> {
    let cross: CrossTerms = take(&mut map, "cross_terms")?.unwrap_or_default();
    let prob: CobbDouglasProblem = decode(map)?;
    let sol = solve_closed_form(&prob)?;
    let (r1, r2, r3) = first_order_residuals(&prob, &sol)?;
    let rel = relative_first_order_residuals(&prob, &sol)?;
    let report = classify_second_order(&prob, &sol, cross)?;
    Ok(Output::doc(json!({
        "L_C_star": sol.l_c_star,
        "R_B_star": sol.r_b_star,
        "lambda": sol.lambda,
        "U_star": sol.u_star,
        "kkt_ok": sol.kkt_ok,
        "identity_residual": sol.identity_residual,
        "identity_value": sol.lambda / prob.returns_to_scale() * prob.budget,
        "mrs": mrs(&prob, sol.l_c_star, sol.r_b_star)?,
        "price_ratio": prob.p1 / prob.p2,
        "foc_residuals": [r1, r2, r3],
        "foc_relative_residuals": rel,
        "second_order": {
            "cross_terms": report.cross_terms,
            "ShadowForm": { "det": report.shadow.det, "class": report.shadow.class },
            "DirectForm": { "det": report.direct.det, "class": report.direct.class },
            "variants_agree": report.variants_agree(),
        },
    })))
}

fn hessian(mut map: Map<String, Value>) -> Result<Output, CliError> {
    let cross: CrossTerms = take(&mut map, "cross_terms")?.unwrap_or_default();
    let lambda: Option<f64> = take(&mut map, "lambda")?;
    let prob: CobbDouglasProblem = decode(map)?;
    let mut sol = solve_closed_form(&prob)?;
    if let Some(l) = lambda {
        if !l.is_finite() {
            return Err(CliError::Input("field `lambda`: must be finite".into()));
        }
        sol.lambda = l;
    }
    let mut variants = Map::new();
    for v in HessianVariant::ALL {
        let h = build_bordered_hessian(&prob, &sol, v, cross)?;
        variants.insert(
            format!("{v:?}"),
            json!({ "det": h.determinant(), "class": h.classify(), "entries": h.entries }),
        );
    }
    Ok(Output::doc(json!({
        "L_C_star": sol.l_c_star,
        "R_B_star": sol.r_b_star,
        "lambda": sol.lambda,
        "cross_terms": cross,
        "variants": variants,
    })))
}

fn phi(mut map: Map<String, Value>) -> Result<Output, CliError> {
    // The schedule's fixed cost defaults to the case's bargaining cost.
    let fixed: Option<f64> = take(&mut map, "C_b_fixed")?;
    let cb: Option<f64> = take(&mut map, "C_b")?;
    let rates: Vec<RatePair> =
        take(&mut map, "rates")?.ok_or_else(|| CliError::Input("missing field `rates`".into()))?;
    let intensities: Vec<f64> =
        take(&mut map, "L")?.ok_or_else(|| CliError::Input("missing field `L`".into()))?;
    let with_fixed: bool = take(&mut map, "with_fixed")?.unwrap_or(true);
    let r_b: Option<f64> = take(&mut map, "R_B")?;
    let p_c: Option<f64> = take(&mut map, "P_C")?;
    if let Some(k) = map.keys().next() {
        return Err(CliError::Input(format!("unknown field `{k}`")));
    }
    let fixed = fixed
        .or(cb)
        .ok_or_else(|| CliError::Input("missing field `C_b_fixed` (or `C_b`)".into()))?;
    let s = CostSchedule::new(fixed, rates)?;
    let total = phi_total(&s, &intensities, with_fixed)?;
    let components = (0..s.len())
        .map(|i| phi_component(&s, i, intensities[i], with_fixed))
        .collect::<lexopt::Result<Vec<_>>>()?;
    let mut out = json!({
        "C_b_fixed": fixed,
        "with_fixed": with_fixed,
        "components": components,
        "phi_total": total,
    });
    if let Some(r_b) = r_b {
        out["admissible"] = admissible(&s, &intensities, r_b)?.into();
        out["phi_within_bounds"] = phi_within_bounds(total, r_b).into();
        if let Some(p_c) = p_c {
            out["within_budget"] = within_budget(&s, &intensities, r_b, p_c)?.into();
        }
    }
    Ok(Output::doc(out))
}

fn candidates_table(res: &AlphaSearchResult) -> Table {
    let mut t = Table::new([
        "alpha",
        "L_C_star",
        "R_B_star",
        "lambda",
        "U_star",
        "det_h",
        "shadow_share",
        "admissible",
        "selected",
    ]);
    for c in &res.candidates {
        t.push(vec![
            c.alpha.into(),
            c.solution.l_c_star.into(),
            c.solution.r_b_star.into(),
            c.solution.lambda.into(),
            c.solution.u_star.into(),
            c.det_h.into(),
            c.shadow_share.into(),
            c.admissible.into(),
            (Some(c.alpha) == res.alpha_star).into(),
        ]);
    }
    t
}

fn alpha(mut map: Map<String, Value>) -> Result<Output, CliError> {
    let phi_sum: Option<f64> = take(&mut map, "phi_sum")?;
    let r_b: Option<f64> = take(&mut map, "R_B")?;
    let cfg: AlphaSearchConfig = decode(map)?;
    let res = search_alpha(&cfg)?;

    let final_u = match (res.selected(), phi_sum, r_b) {
        (Some(c), Some(phi_sum), Some(r_b)) => {
            Some(final_utility(&c.solution, c.alpha, cfg.beta, phi_sum, r_b)?)
        }
        (_, Some(_), None) | (_, None, Some(_)) => {
            return Err(CliError::Input(
                "`phi_sum` and `R_B` must be given together".into(),
            ))
        }
        _ => None,
    };

    let mut json = serde_json::to_value(&res).expect("result serializes");
    json["admissible_count"] = res.admissible().count().into();
    json["final_utility"] = final_u.into();
    let comments = vec![format!(
        "alpha_star={} U_star_final={}",
        Cell::from(res.alpha_star).render(),
        Cell::from(res.u_star_final).render()
    )];
    Ok(Output {
        json,
        table: Some((candidates_table(&res), comments)),
    })
}

fn comply(mut map: Map<String, Value>) -> Result<Output, CliError> {
    let margin: Option<f64> = take(&mut map, "margin")?;
    let g: StrategyGame = decode(map)?;
    g.validate()?;
    let margin = margin.unwrap_or_else(|| g.default_margin());
    let (s_in, u_in) = best_allowed(&g);
    let (s_all, u_all) = best_overall(&g);
    let mut out = json!({
        "best_allowed": { "strategy": s_in, "utility": u_in },
        "best_overall": { "strategy": s_all, "utility": u_all },
        "margin": margin,
    });
    match min_compliance_penalty(&g, margin) {
        Ok(tau) => {
            let (winner, _) = best_overall(&g.with_penalty(tau));
            out["penalty"] = tau.into();
            out["post_penalty_best"] = winner.into();
        }
        // Nothing to deter: every strategy is allowed.
        Err(Error::NoDisallowedStrategy) => {
            out["penalty"] = Value::Null;
            out["post_penalty_best"] = s_in.into();
        }
        Err(e) => return Err(e.into()),
    }
    Ok(Output::doc(out))
}

fn sim_config(mut map: Map<String, Value>, seed: u64) -> Result<SimConfig, CliError> {
    map.remove("seed");
    let mut cfg: SimConfig = decode(map)?;
    cfg.seed = seed;
    cfg.validate()?;
    Ok(cfg)
}

fn simulate(map: Map<String, Value>, seed: u64) -> Result<Output, CliError> {
    let cfg = sim_config(map, seed)?;
    let states = sim::run(&cfg)?;
    let (ta, tb) = cfg.thresholds();
    let json = json!({
        "seed": seed,
        "theta_a": ta,
        "theta_b": tb,
        "trajectory": states,
    });
    Ok(Output {
        json,
        table: Some((sim::trajectory_table(&states), vec![format!("seed={seed}")])),
    })
}

fn sweep(mut map: Map<String, Value>, seed: u64) -> Result<Output, CliError> {
    let grid: Vec<f64> = take(&mut map, "C_a_grid")?.unwrap_or_else(default_admin_cost_grid);
    let cfg = sim_config(map, seed)?;
    let table = sweep_admin_cost(&cfg, &grid)?;
    let (ta, tb) = cfg.thresholds();
    let best = &table.rows[table.best_welfare];
    let fewest = &table.rows[table.min_trials];
    let json = json!({
        "seed": seed,
        "theta_a": ta,
        "theta_b": tb,
        "rows": table.rows,
        "best_welfare_C_a": best.admin_cost,
        "min_trials_C_a": fewest.admin_cost,
    });
    let comments = vec![format!("seed={seed}"), table.flags_comment()];
    Ok(Output {
        json,
        table: Some((table.table(), comments)),
    })
}

/// Flatten a JSON document into a single CSV row with dotted column names.
pub fn flatten(doc: &Value) -> Table {
    fn walk(prefix: &str, v: &Value, header: &mut Vec<String>, row: &mut Vec<Cell>) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, v)| walk(&key(k), v, header, row)),
            Value::Array(a) => a
                .iter()
                .enumerate()
                .for_each(|(i, v)| walk(&key(&i.to_string()), v, header, row)),
            leaf => {
                header.push(prefix.to_string());
                row.push(match leaf {
                    Value::Null => Cell::Empty,
                    Value::Bool(b) => Cell::Bool(*b),
                    Value::Number(n) => match n.as_u64() {
                        Some(u) => Cell::Int(u),
                        None => Cell::Num(n.as_f64().expect("finite number")),
                    },
                    Value::String(s) => Cell::Text(s.clone()),
                    _ => unreachable!(),
                });
            }
        }
    }
    let (mut header, mut row) = (Vec::new(), Vec::new());
    walk("", doc, &mut header, &mut row);
    let mut t = Table::new(header);
    t.push(row);
    t
}
