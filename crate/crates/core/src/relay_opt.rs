//! Minimum-power, sum-rate-maximizing relay allocation.
//!
//! The relay water-fills each BC direction separately, so a solution is a
//! pair of water levels `(L1, L2)`, one per destination node. The MA-phase
//! rates turn into level constraints through three relative levels:
//!
//! * direction 1 may not exceed `cap(1) = 1/mu_2`, the level at which its
//!   rate on `alpha_1` equals `r_bar_2r`, and symmetrically for direction 2;
//! * `1/mu_ma` is the common level at which the pooled gains reach `r_ma`.
//!
//! [`optimize`] walks the seven-step procedure from the initial full-power
//! level `1/lambda0` and records which steps it visited, so the path can be
//! checked against [`classify_case`], which predicts it from power
//! thresholds alone.

use std::fmt;

use serde::Serialize;

use crate::channel::SubchannelGains;
use crate::error::Result;
use crate::linalg;
use crate::ma_phase::MaRates;
use crate::waterfill::{self, forward_waterfill, inverse_waterfill, power_of_level, rate_of_level};
use crate::{CMatrix, Node};

/// Absolute slack on level comparisons inside the algorithm.
pub const LEVEL_SLACK: f64 = 1e-9;
/// Slack on the BC sum-rate comparison against `r_ma`.
pub const RATE_SLACK: f64 = 1e-9;

/// Relative water levels, all stored as levels in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeLevels {
    /// `1/mu_1`: level on `alpha_2` whose rate equals `r_bar_1r`.
    pub mu1_level: f64,
    /// `1/mu_2`: level on `alpha_1` whose rate equals `r_bar_2r`.
    pub mu2_level: f64,
    /// `1/mu_ma`: common level on the pooled gains whose rate equals `r_ma`.
    pub mu_ma_level: f64,
    /// `1/lambda0`: pooled water level spending the whole relay budget.
    pub lambda0_level: f64,
}

impl RelativeLevels {
    /// Upper bound on the level of BC direction `direction`.
    pub fn cap(&self, direction: Node) -> f64 {
        match direction {
            Node::One => self.mu2_level,
            Node::Two => self.mu1_level,
        }
    }

    pub fn caps(&self) -> [f64; 2] {
        [self.cap(Node::One), self.cap(Node::Two)]
    }

    pub fn low_cap(&self) -> f64 {
        self.mu1_level.min(self.mu2_level)
    }

    pub fn high_cap(&self) -> f64 {
        self.mu1_level.max(self.mu2_level)
    }

    /// True when the pooled level sits at or below both caps.
    pub fn is_symmetric(&self) -> bool {
        self.mu_ma_level <= self.low_cap() + LEVEL_SLACK
    }
}

pub fn relative_levels(gains: &SubchannelGains, rates: &MaRates, pr_max: f64) -> RelativeLevels {
    let a1 = gains.alpha(Node::One);
    let a2 = gains.alpha(Node::Two);
    let pooled = waterfill::pooled(a1, a2);
    RelativeLevels {
        mu1_level: inverse_waterfill(a2, rates.r_bar_1r).level,
        mu2_level: inverse_waterfill(a1, rates.r_bar_2r).level,
        mu_ma_level: inverse_waterfill(&pooled, rates.r_ma).level,
        lambda0_level: forward_waterfill(&pooled, pr_max).level,
    }
}

/// Relay power thresholds separating the regimes of the algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdLedger {
    /// Pooled power at the common level `1/mu_ma`.
    pub p_ma: f64,
    /// Pooled power at the lower cap.
    pub p_l: f64,
    /// Power with both directions exactly at their caps.
    pub p_t: f64,
    /// Pooled power at the higher cap.
    pub p_s: f64,
    /// Saturation power in the asymmetric case; equals `p_ma` otherwise.
    pub p_bar_ma: f64,
    /// Levels `(1/lambda_bar_1, 1/lambda_bar_2)` behind `p_bar_ma`, asymmetric case only.
    pub bar_levels: Option<[f64; 2]>,
    pub case_symmetric: bool,
}

impl ThresholdLedger {
    /// Relay power beyond which the allocation stops growing.
    pub fn saturation(&self) -> f64 {
        if self.case_symmetric {
            self.p_ma
        } else {
            self.p_bar_ma
        }
    }
}

fn pair_power(gains: &SubchannelGains, levels: [f64; 2]) -> f64 {
    Node::BOTH
        .iter()
        .map(|&n| power_of_level(gains.alpha(n), levels[n.index()]))
        .sum()
}

pub fn thresholds(
    gains: &SubchannelGains,
    levels: &RelativeLevels,
    rates: &MaRates,
) -> ThresholdLedger {
    let uniform = |l: f64| pair_power(gains, [l, l]);
    let p_ma = uniform(levels.mu_ma_level);
    let case_symmetric = levels.is_symmetric();
    let bar_levels = (!case_symmetric).then(|| {
        // the direction with the higher cap saturates first on r_ma; the other
        // stays pinned at its cap
        let wide = if levels.cap(Node::One) >= levels.cap(Node::Two) {
            Node::One
        } else {
            Node::Two
        };
        let mut bar = [0.0; 2];
        bar[wide.other().index()] = levels.cap(wide.other());
        bar[wide.index()] =
            inverse_waterfill(gains.alpha(wide), (rates.r_ma - rates.r_bar(wide)).max(0.0)).level;
        bar
    });
    ThresholdLedger {
        p_ma,
        p_l: uniform(levels.low_cap()),
        p_t: pair_power(gains, levels.caps()),
        p_s: uniform(levels.high_cap()),
        p_bar_ma: bar_levels.map_or(p_ma, |b| pair_power(gains, b)),
        bar_levels,
        case_symmetric,
    }
}

/// Ordered list of visited algorithm steps, printed as `1-2-3-6`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct StepPath(pub Vec<u8>);

impl StepPath {
    pub fn new(steps: &[u8]) -> Self {
        StepPath(steps.to_vec())
    }

    pub fn contains(&self, step: u8) -> bool {
        self.0.contains(&step)
    }
}

impl fmt::Display for StepPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
        f.write_str(&parts.join("-"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaySolution {
    /// `(1/lambda_1, 1/lambda_2)` in watts.
    pub levels: [f64; 2],
    pub powers: [Vec<f64>; 2],
    /// Relay covariances `B_i = V_ri P_ri V_ri^H`.
    pub b: [CMatrix; 2],
    pub consumed_power: f64,
    /// `0.5 * min(r_ma, min(R_r1, r_bar_2r) + min(R_r2, r_bar_1r))`.
    pub sum_rate_tw: f64,
    /// `(R_r1, R_r2)`, unhalved.
    pub bc_rates: [f64; 2],
    pub step_trace: StepPath,
    pub efficient: bool,
    pub source_waste: bool,
    pub relative: RelativeLevels,
    pub ledger: ThresholdLedger,
}

impl RelaySolution {
    pub fn bc_sum(&self) -> f64 {
        self.bc_rates[0] + self.bc_rates[1]
    }
}

/// Two-way sum-rate of a level pair (halved).
pub fn two_way_rate(gains: &SubchannelGains, rates: &MaRates, levels: [f64; 2]) -> f64 {
    let capped: f64 = Node::BOTH
        .iter()
        .map(|&n| rate_of_level(gains.alpha(n), levels[n.index()]).min(rates.cap(n)))
        .sum();
    0.5 * rates.r_ma.min(capped)
}

/// Runs the seven-step relay algorithm and returns levels, covariances and
/// diagnostics.
pub fn optimize(gains: &SubchannelGains, rates: &MaRates, pr_max: f64) -> Result<RelaySolution> {
    rates.validate()?;
    let rel = relative_levels(gains, rates, pr_max);
    let ledger = thresholds(gains, &rel, rates);
    let (levels, trace) = run_steps(gains, rates, &rel, pr_max);

    let powers = Node::BOTH
        .map(|n| waterfill::allocation_at_level(gains.alpha(n), levels[n.index()]).powers);
    let b = Node::BOTH.map(|n| {
        linalg::hermitize(&linalg::from_eigen_powers(
            &gains.dir(n).v,
            &powers[n.index()],
        ))
    });
    let bc_rates = Node::BOTH.map(|n| rate_of_level(gains.alpha(n), levels[n.index()]));
    let mut sol = RelaySolution {
        levels,
        consumed_power: pair_power(gains, levels),
        sum_rate_tw: two_way_rate(gains, rates, levels),
        bc_rates,
        powers,
        b,
        step_trace: trace,
        efficient: false,
        source_waste: false,
        relative: rel,
        ledger,
    };
    let (efficient, waste) = diagnostics(&sol, gains, &ledger, pr_max);
    sol.efficient = efficient;
    sol.source_waste = waste;
    Ok(sol)
}

fn run_steps(
    gains: &SubchannelGains,
    rates: &MaRates,
    rel: &RelativeLevels,
    pr_max: f64,
) -> ([f64; 2], StepPath) {
    let caps = rel.caps();
    let l0 = rel.lambda0_level;
    let mut lv = [l0, l0];
    let mut trace = vec![1, 2];

    // Steps 2-5: enforce the per-direction caps, handing freed power to the other side
    let over = |lv: [f64; 2], d: usize| lv[d] > caps[d] + LEVEL_SLACK;
    if over(lv, 0) || over(lv, 1) {
        let first = if over(lv, 0) { Node::One } else { Node::Two };
        let (a, b) = (first.index(), first.other().index());
        trace.push(3);
        lv[a] = caps[a];
        if !over(lv, b) {
            trace.push(4);
            let spare = (pr_max - power_of_level(gains.alpha(first), caps[a])).max(0.0);
            lv[b] = forward_waterfill(gains.alpha(first.other()), spare).level;
            if over(lv, b) {
                trace.push(5);
                lv[b] = caps[b];
            }
        } else {
            trace.push(5);
            lv[b] = caps[b];
        }
    }

    // Step 6: enforce the MA sum-rate
    trace.push(6);
    let m = rel.mu_ma_level;
    if lv.iter().all(|&l| l >= m - LEVEL_SLACK) {
        return ([m, m], StepPath(trace));
    }
    if lv.iter().all(|&l| l <= m + LEVEL_SLACK) {
        return (lv, StepPath(trace));
    }
    let bc: f64 = Node::BOTH
        .iter()
        .map(|&n| rate_of_level(gains.alpha(n), lv[n.index()]))
        .sum();
    if bc <= rates.r_ma + RATE_SLACK {
        return (lv, StepPath(trace));
    }

    // Step 7: lower the higher level until the BC sum meets r_ma
    trace.push(7);
    let high = if lv[0] > lv[1] { Node::One } else { Node::Two };
    let target = (rates.r_ma - rates.r_bar(high)).max(0.0);
    lv[high.index()] = inverse_waterfill(gains.alpha(high), target).level;
    (lv, StepPath(trace))
}

/// Step path the algorithm should take, predicted from thresholds alone.
pub fn classify_case(ledger: &ThresholdLedger, pr_max: f64) -> StepPath {
    let p = pr_max;
    let path: &[u8] = if ledger.case_symmetric {
        if p <= ledger.p_l {
            &[1, 2, 6]
        } else if p <= ledger.p_t {
            &[1, 2, 3, 4, 6]
        } else if p <= ledger.p_s {
            &[1, 2, 3, 4, 5, 6]
        } else {
            &[1, 2, 3, 5, 6]
        }
    } else if p <= ledger.p_l {
        &[1, 2, 6]
    } else if p <= ledger.p_bar_ma {
        &[1, 2, 3, 4, 6]
    } else if p <= ledger.p_t {
        &[1, 2, 3, 4, 6, 7]
    } else if p <= ledger.p_s {
        &[1, 2, 3, 4, 5, 6, 7]
    } else {
        &[1, 2, 3, 5, 6, 7]
    };
    StepPath::new(path)
}

/// `(efficient, source_waste)` for a solution.
///
/// Efficient: the BC sum-rate is the best any split of the consumed power
/// could reach. Source waste: the BC side is what limits the two-way rate.
pub fn diagnostics(
    solution: &RelaySolution,
    gains: &SubchannelGains,
    ledger: &ThresholdLedger,
    pr_max: f64,
) -> (bool, bool) {
    let pooled = waterfill::pooled(gains.alpha(Node::One), gains.alpha(Node::Two));
    let best_bc = forward_waterfill(&pooled, solution.consumed_power).rate;
    let efficient = solution.bc_sum() >= best_bc - 1e-9;
    let source_waste = pr_max < ledger.saturation();
    (efficient, source_waste)
}
