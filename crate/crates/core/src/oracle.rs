//! Brute-force reference for the relay problem.
//!
//! [`grid_certify`] searches a grid of water-level pairs for the largest
//! two-way rate and the smallest power reaching it. It shares only the scalar
//! water-filling kernels with [`crate::relay_opt`]; nothing about the
//! seven-step procedure is assumed.
//!
//! Both the two-way rate and the power are nondecreasing in each level, so
//! the search over the second axis is a pointer sweep on precomputed
//! columns. Every grid pair is still covered.

use serde::Serialize;

use crate::channel::SubchannelGains;
use crate::ma_phase::MaRates;
use crate::waterfill::{self, forward_waterfill, inverse_waterfill, power_of_level, rate_of_level};
use crate::Node;

/// Grid points within this many nats of the best rate count as maximizers.
pub const RATE_TIE: f64 = 1e-9;
/// Budget feasibility slack in watts.
pub const POWER_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    /// Largest two-way rate on the grid (halved, nats).
    pub best_rate: f64,
    pub min_power_at_best: f64,
    /// Level pair achieving `best_rate` with `min_power_at_best`.
    pub argmax_levels: [f64; 2],
    /// Full-power maximizer, see [`baseline_full_power`].
    pub baseline_levels: [f64; 2],
    pub grid_resolution: f64,
    pub grid_points: usize,
}

/// A two-way-rate maximizer that spends the whole relay budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Baseline {
    pub levels: [f64; 2],
    /// Unhalved BC rates `(R_r1, R_r2)`.
    pub bc_rates: [f64; 2],
    pub consumed_power: f64,
    /// Halved two-way rate.
    pub tw_rate: f64,
}

/// Upper bound on the power change from moving each level by one grid step.
pub fn power_lipschitz_bound(gains: &SubchannelGains, resolution: f64) -> f64 {
    (gains.alpha(Node::One).len() + gains.alpha(Node::Two).len()) as f64 * resolution
}

/// Upper bound on the BC rate change from moving each level by one grid step.
pub fn rate_lipschitz_bound(gains: &SubchannelGains, resolution: f64) -> f64 {
    let total: f64 = gains
        .alpha(Node::One)
        .iter()
        .chain(gains.alpha(Node::Two))
        .sum();
    total * resolution
}

fn tw(rates: &MaRates, capped: [f64; 2]) -> f64 {
    0.5 * rates.r_ma.min(capped[0] + capped[1])
}

/// Levels that must be on the grid: every breakpoint, each direction's rate
/// cap, the pooled MA level and the pooled full-power level.
fn special_levels(gains: &SubchannelGains, rates: &MaRates, pr_max: f64) -> Vec<f64> {
    let a1 = gains.alpha(Node::One);
    let a2 = gains.alpha(Node::Two);
    let pooled = waterfill::pooled(a1, a2);
    let mut out: Vec<f64> = pooled.iter().map(|a| 1.0 / a).collect();
    out.push(inverse_waterfill(a1, rates.r_bar_2r).level);
    out.push(inverse_waterfill(a2, rates.r_bar_1r).level);
    out.push(inverse_waterfill(&pooled, rates.r_ma).level);
    out.push(forward_waterfill(&pooled, pr_max).level);
    out
}

fn uniform_fill(start: f64, end: f64, resolution: f64, out: &mut Vec<f64>) {
    let steps = ((end - start) / resolution).floor().max(0.0) as usize;
    out.extend((0..=steps).map(|k| start + k as f64 * resolution));
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Exhaustive search over a grid of level pairs.
pub fn grid_certify(
    gains: &SubchannelGains,
    rates: &MaRates,
    pr_max: f64,
    resolution: f64,
) -> OracleResult {
    assert!(resolution > 0.0, "resolution must be positive");
    let a = [gains.alpha(Node::One), gains.alpha(Node::Two)];
    let start = (1.0 / a[0][0]).min(1.0 / a[1][0]);
    let end = a
        .iter()
        .map(|g| forward_waterfill(g, pr_max).level)
        .fold(start, f64::max);

    let mut levels = special_levels(gains, rates, pr_max);
    uniform_fill(start, end, resolution, &mut levels);
    let grid = sorted_unique(levels);

    let power: [Vec<f64>; 2] =
        [0, 1].map(|d| grid.iter().map(|&l| power_of_level(a[d], l)).collect());
    let capped: [Vec<f64>; 2] = [0, 1].map(|d| {
        let cap = rates.cap(Node::from_index(d));
        grid.iter()
            .map(|&l| rate_of_level(a[d], l).min(cap))
            .collect()
    });

    // Largest feasible second-axis index for each first-axis point. It can
    // only shrink as the first level grows, so one pointer walks down.
    let budget = pr_max + POWER_SLACK;
    let mut feasible: Vec<(usize, usize)> = Vec::new();
    let mut h = grid.len() - 1;
    for g1 in 0..grid.len() {
        if power[0][g1] > budget {
            break;
        }
        let rem = budget - power[0][g1];
        while h > 0 && power[1][h] > rem {
            h -= 1;
        }
        feasible.push((g1, h));
    }

    let best_rate = feasible
        .iter()
        .map(|&(g1, h)| tw(rates, [capped[0][g1], capped[1][h]]))
        .fold(0.0, f64::max);

    // smallest second-axis index reaching the best rate, also nonincreasing in g1
    let target = best_rate - RATE_TIE;
    let mut min_power = f64::INFINITY;
    let mut argmax = [grid[0], grid[0]];
    let mut g2 = grid.len() - 1;
    for &(g1, h) in &feasible {
        if tw(rates, [capped[0][g1], capped[1][h]]) < target {
            continue;
        }
        while g2 > 0 && tw(rates, [capped[0][g1], capped[1][g2 - 1]]) >= target {
            g2 -= 1;
        }
        let p = power[0][g1] + power[1][g2];
        if p < min_power {
            min_power = p;
            argmax = [grid[g1], grid[g2]];
        }
    }

    OracleResult {
        best_rate,
        min_power_at_best: min_power,
        argmax_levels: argmax,
        baseline_levels: baseline_full_power(gains, rates, pr_max, resolution).levels,
        grid_resolution: resolution,
        grid_points: grid.len(),
    }
}

/// Full-power maximizer of the two-way rate, ignoring power minimization.
///
/// Scans the level of one direction over a grid (seeded with the special
/// levels) while the other direction water-fills whatever power is left, for
/// both choices of scanned direction. Among maximizers of the two-way rate
/// the one with the largest BC sum-rate wins.
pub fn baseline_full_power(
    gains: &SubchannelGains,
    rates: &MaRates,
    pr_max: f64,
    resolution: f64,
) -> Baseline {
    assert!(resolution > 0.0, "resolution must be positive");
    let specials = special_levels(gains, rates, pr_max);
    let mut candidates: Vec<Baseline> = Vec::new();
    for scanned in Node::BOTH {
        let own = gains.alpha(scanned);
        let rest = gains.alpha(scanned.other());
        let lo = 1.0 / own[0];
        let hi = forward_waterfill(own, pr_max).level;
        let mut axis: Vec<f64> = specials
            .iter()
            .copied()
            .filter(|&l| l >= lo && l <= hi)
            .collect();
        axis.push(lo);
        axis.push(hi);
        uniform_fill(lo, hi, resolution, &mut axis);
        for l in sorted_unique(axis) {
            let spare = (pr_max - power_of_level(own, l)).max(0.0);
            let other = forward_waterfill(rest, spare).level;
            let mut levels = [0.0; 2];
            levels[scanned.index()] = l;
            levels[scanned.other().index()] = other;
            let bc_rates =
                [0, 1].map(|d| rate_of_level(gains.alpha(Node::from_index(d)), levels[d]));
            let capped = [0, 1].map(|d| bc_rates[d].min(rates.cap(Node::from_index(d))));
            candidates.push(Baseline {
                levels,
                bc_rates,
                consumed_power: power_of_level(own, l) + power_of_level(rest, other),
                tw_rate: tw(rates, capped),
            });
        }
    }
    let best = candidates.iter().map(|c| c.tw_rate).fold(0.0, f64::max);
    candidates
        .into_iter()
        .filter(|c| c.tw_rate >= best - RATE_TIE)
        .max_by(|x, y| (x.bc_rates[0] + x.bc_rates[1]).total_cmp(&(y.bc_rates[0] + y.bc_rates[1])))
        .expect("at least one candidate")
}
