//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every export returns a JSON string; failures come back as
//! `{"error": "..."}` so the page has one decoding path. The `*_value`
//! functions hold the logic and are what the native tests exercise.

use serde::Serialize;
use serde_json::{json, Value};
use twr_core::oracle::baseline_full_power;
use twr_core::relay_opt::optimize;
use twr_core::trial::prepare_trial;
use twr_core::waterfill::{forward_waterfill, pooled, power_of_level, rate_of_level};
use twr_core::{MaRates, Node, SubchannelGains, SystemConfig};
use wasm_bindgen::prelude::*;

const BASELINE_RESOLUTION: f64 = 1e-3;

fn respond(result: Result<Value, String>) -> String {
    result.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn instance(
    alpha1: &[f64],
    alpha2: &[f64],
    r_ma: f64,
    r_bar_1r: f64,
    r_bar_2r: f64,
) -> Result<(SubchannelGains, MaRates), String> {
    let gains = SubchannelGains::from_gain_lists(alpha1.to_vec(), alpha2.to_vec())
        .map_err(|e| e.to_string())?;
    let rates = MaRates {
        r_ma,
        r_bar_1r,
        r_bar_2r,
    };
    rates.validate().map_err(|e| e.to_string())?;
    Ok((gains, rates))
}

#[derive(Serialize)]
struct Drawn {
    alpha1: Vec<f64>,
    alpha2: Vec<f64>,
    r_ma: f64,
    r_bar_1r: f64,
    r_bar_2r: f64,
}

pub fn draw_instance_value(
    seed: u32,
    n1: u32,
    n2: u32,
    nr: u32,
    p1: f64,
    p2: f64,
) -> Result<Value, String> {
    let config = SystemConfig::uniform_noise(
        (n1 as usize, n2 as usize, nr as usize),
        (p1, p2, 1.0),
        1.0,
        u64::from(seed),
    );
    let t = prepare_trial(&config, 0).map_err(|e| e.to_string())?;
    let r = t.strategy.rates;
    let drawn = Drawn {
        alpha1: t.gains.alpha(Node::One).to_vec(),
        alpha2: t.gains.alpha(Node::Two).to_vec(),
        r_ma: r.r_ma,
        r_bar_1r: r.r_bar_1r,
        r_bar_2r: r.r_bar_2r,
    };
    serde_json::to_value(drawn).map_err(|e| e.to_string())
}

/// Subchannel gains and MA-phase rates of one Rayleigh draw with unit noise.
#[wasm_bindgen]
pub fn draw_instance(seed: u32, n1: u32, n2: u32, nr: u32, p1: f64, p2: f64) -> String {
    respond(draw_instance_value(seed, n1, n2, nr, p1, p2))
}

pub fn solve_value(
    alpha1: &[f64],
    alpha2: &[f64],
    r_ma: f64,
    r_bar_1r: f64,
    r_bar_2r: f64,
    pr_max: f64,
) -> Result<Value, String> {
    let (gains, rates) = instance(alpha1, alpha2, r_ma, r_bar_1r, r_bar_2r)?;
    let s = optimize(&gains, &rates, pr_max).map_err(|e| e.to_string())?;
    Ok(json!({
        "levels": s.levels,
        "powers": s.powers,
        "consumed_power": s.consumed_power,
        "bc_rates": s.bc_rates,
        "sum_rate_tw": s.sum_rate_tw,
        "step_path": s.step_trace.to_string(),
        "efficient": s.efficient,
        "source_waste": s.source_waste,
        "caps": s.relative.caps(),
        "common_level": s.relative.mu_ma_level,
        "full_power_level": s.relative.lambda0_level,
        "thresholds": s.ledger,
    }))
}

/// Minimum-power relay allocation for one instance.
#[wasm_bindgen]
pub fn solve(
    alpha1: Vec<f64>,
    alpha2: Vec<f64>,
    r_ma: f64,
    r_bar_1r: f64,
    r_bar_2r: f64,
    pr_max: f64,
) -> String {
    respond(solve_value(
        &alpha1, &alpha2, r_ma, r_bar_1r, r_bar_2r, pr_max,
    ))
}

#[allow(clippy::too_many_arguments)]
pub fn budget_sweep_value(
    alpha1: &[f64],
    alpha2: &[f64],
    r_ma: f64,
    r_bar_1r: f64,
    r_bar_2r: f64,
    pr_stop: f64,
    points: u32,
) -> Result<Value, String> {
    let (gains, rates) = instance(alpha1, alpha2, r_ma, r_bar_1r, r_bar_2r)?;
    if points < 2 || pr_stop.is_nan() || pr_stop <= 0.0 {
        return Err("need at least two points and a positive top budget".into());
    }
    let mut pr = Vec::new();
    let mut consumed = Vec::new();
    let mut bc_sum = Vec::new();
    let mut baseline_bc_sum = Vec::new();
    let mut tw = Vec::new();
    let mut saturation = 0.0;
    for k in 0..points {
        let p = pr_stop * f64::from(k) / f64::from(points - 1);
        let s = optimize(&gains, &rates, p).map_err(|e| e.to_string())?;
        let b = baseline_full_power(&gains, &rates, p, BASELINE_RESOLUTION);
        saturation = s.ledger.saturation();
        pr.push(p);
        consumed.push(s.consumed_power);
        bc_sum.push(s.bc_sum());
        baseline_bc_sum.push(b.bc_rates[0] + b.bc_rates[1]);
        tw.push(s.sum_rate_tw);
    }
    Ok(json!({
        "pr_max": pr,
        "consumed_power": consumed,
        "bc_sum": bc_sum,
        "baseline_bc_sum": baseline_bc_sum,
        "sum_rate_tw": tw,
        "r_ma": r_ma,
        "saturation": saturation,
    }))
}

/// Minimum-power and full-power solutions over relay budgets `0..=pr_stop`.
#[wasm_bindgen]
pub fn budget_sweep(
    alpha1: Vec<f64>,
    alpha2: Vec<f64>,
    r_ma: f64,
    r_bar_1r: f64,
    r_bar_2r: f64,
    pr_stop: f64,
    points: u32,
) -> String {
    respond(budget_sweep_value(
        &alpha1, &alpha2, r_ma, r_bar_1r, r_bar_2r, pr_stop, points,
    ))
}

pub fn split_curve_value(
    alpha1: &[f64],
    alpha2: &[f64],
    budget: f64,
    points: u32,
) -> Result<Value, String> {
    SubchannelGains::from_gain_lists(alpha1.to_vec(), alpha2.to_vec())
        .map_err(|e| e.to_string())?;
    if points < 2 || budget.is_nan() || budget <= 0.0 {
        return Err("need at least two points and a positive budget".into());
    }
    let lo = 1.0 / alpha1[0];
    let hi = forward_waterfill(alpha1, budget).level;
    let mut level1 = Vec::new();
    let mut bc_sum = Vec::new();
    for k in 0..points {
        let l1 = lo + (hi - lo) * f64::from(k) / f64::from(points - 1);
        let rest = (budget - power_of_level(alpha1, l1)).max(0.0);
        level1.push(l1);
        bc_sum.push(rate_of_level(alpha1, l1) + forward_waterfill(alpha2, rest).rate);
    }
    let peak = forward_waterfill(&pooled(alpha1, alpha2), budget);
    Ok(json!({
        "level1": level1,
        "bc_sum": bc_sum,
        "peak_level": peak.level,
        "peak_bc_sum": peak.rate,
    }))
}

/// BC sum-rate as a fixed budget shifts between the two directions.
#[wasm_bindgen]
pub fn split_curve(alpha1: Vec<f64>, alpha2: Vec<f64>, budget: f64, points: u32) -> String {
    respond(split_curve_value(&alpha1, &alpha2, budget, points))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: &Value, key: &str) -> f64 {
        v[key].as_f64().unwrap()
    }

    #[test]
    fn solve_worked_instance() {
        let v = solve_value(&[1.0], &[1.0], 6f64.ln(), 4f64.ln(), 2f64.ln(), 6.0).unwrap();
        assert!((v["levels"][0].as_f64().unwrap() - 2.0).abs() < 1e-10);
        assert!((v["levels"][1].as_f64().unwrap() - 3.0).abs() < 1e-10);
        assert!((f(&v, "consumed_power") - 3.0).abs() < 1e-10);
        assert_eq!(v["step_path"], "1-2-3-4-5-6-7");
        assert_eq!(v["efficient"], false);
    }

    #[test]
    fn errors_become_json() {
        let bad = solve(vec![1.0], vec![1.0], 2.0, 0.5, 0.5, 1.0);
        let v: Value = serde_json::from_str(&bad).unwrap();
        assert!(v["error"].is_string());
        let empty: Value = serde_json::from_str(&split_curve(vec![], vec![1.0], 1.0, 10)).unwrap();
        assert!(empty["error"].is_string());
    }

    #[test]
    fn sweep_saturates() {
        let v =
            budget_sweep_value(&[1.0], &[1.0], 3f64.ln(), 2f64.ln(), 2f64.ln(), 4.0, 41).unwrap();
        let consumed: Vec<f64> = serde_json::from_value(v["consumed_power"].clone()).unwrap();
        let sat = f(&v, "saturation");
        assert!((sat - 2.0 * (3f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!(consumed.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!((consumed[40] - sat).abs() < 1e-12);
        let base: Vec<f64> = serde_json::from_value(v["baseline_bc_sum"].clone()).unwrap();
        assert!(base[40] > 3f64.ln());
    }

    #[test]
    fn split_curve_peaks_at_pooled_level() {
        let v = split_curve_value(&[2.0, 0.5], &[1.0], 3.0, 301).unwrap();
        let bc: Vec<f64> = serde_json::from_value(v["bc_sum"].clone()).unwrap();
        assert!(bc.iter().all(|&x| x <= f(&v, "peak_bc_sum") + 1e-12));
    }

    #[test]
    fn draw_gives_consistent_rates() {
        let v = draw_instance_value(7, 2, 3, 3, 1.0, 2.0).unwrap();
        assert!(f(&v, "r_ma") < f(&v, "r_bar_1r") + f(&v, "r_bar_2r"));
        let a1: Vec<f64> = serde_json::from_value(v["alpha1"].clone()).unwrap();
        assert!(a1.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(
            draw_instance(7, 2, 3, 3, 1.0, 2.0),
            draw_instance(7, 2, 3, 3, 1.0, 2.0)
        );
    }
}
