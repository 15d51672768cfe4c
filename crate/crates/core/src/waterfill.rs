//! Water-filling over a list of parallel subchannel gains.
//!
//! A gain list holds `alpha(k) = |omega(k)|^2 / sigma^2` in 1/W, sorted in
//! descending order. A water level `L` (watts, the reciprocal of the
//! Lagrange multiplier `lambda`) assigns `p(k) = (L - 1/alpha(k))^+` to every
//! subchannel, for a total rate of `sum ln(alpha(k) L)` over the active ones.
//!
//! Both the forward map (budget to level) and the inverse map (rate to level)
//! are solved in closed form by scanning the active-set size once.

use serde::Serialize;

/// A water level together with the allocation it induces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelAllocation {
    /// Water level `1/lambda` in watts.
    pub level: f64,
    /// Per-subchannel powers, aligned with the gain list.
    pub powers: Vec<f64>,
    /// Rate in nats.
    pub rate: f64,
    pub total_power: f64,
}

impl LevelAllocation {
    /// Number of subchannels with strictly positive power.
    pub fn active(&self) -> usize {
        self.powers.iter().take_while(|&&p| p > 0.0).count()
    }
}

fn debug_check_gains(gains: &[f64]) {
    debug_assert!(
        gains.iter().all(|&g| g > 0.0 && g.is_finite()),
        "gains must be positive and finite"
    );
    debug_assert!(
        gains.windows(2).all(|w| w[0] >= w[1]),
        "gains must be sorted descending"
    );
}

/// Lowest meaningful level for a gain list: below it no subchannel is active.
pub fn floor_level(gains: &[f64]) -> f64 {
    1.0 / gains[0]
}

/// `sum_k ln(1 + (alpha(k) L - 1)^+)`.
pub fn rate_of_level(gains: &[f64], level: f64) -> f64 {
    debug_check_gains(gains);
    gains
        .iter()
        .map(|&a| a * level)
        .take_while(|&x| x > 1.0)
        .map(f64::ln)
        .sum()
}

/// `sum_k (L - 1/alpha(k))^+`.
pub fn power_of_level(gains: &[f64], level: f64) -> f64 {
    debug_check_gains(gains);
    gains
        .iter()
        .map(|&a| level - 1.0 / a)
        .take_while(|&p| p > 0.0)
        .sum()
}

/// Builds the full allocation for a given level.
pub fn allocation_at_level(gains: &[f64], level: f64) -> LevelAllocation {
    let powers: Vec<f64> = gains.iter().map(|&a| (level - 1.0 / a).max(0.0)).collect();
    LevelAllocation {
        level,
        rate: rate_of_level(gains, level),
        total_power: powers.iter().sum(),
        powers,
    }
}

/// Spreads `budget` watts over the gains and returns the water level that
/// uses it exactly.
///
/// A zero budget gives the floor level `1/alpha(1)` with all powers zero.
pub fn forward_waterfill(gains: &[f64], budget: f64) -> LevelAllocation {
    debug_check_gains(gains);
    assert!(
        !gains.is_empty(),
        "forward_waterfill needs at least one gain"
    );
    if budget <= 0.0 {
        return allocation_at_level(gains, floor_level(gains));
    }
    let mut inv_sum = 0.0;
    let mut level = floor_level(gains);
    for (m, &a) in gains.iter().enumerate() {
        inv_sum += 1.0 / a;
        level = (budget + inv_sum) / (m + 1) as f64;
        // a level sitting exactly on the next breakpoint keeps that channel inactive
        match gains.get(m + 1) {
            Some(&next) if level > 1.0 / next => continue,
            _ => break,
        }
    }
    allocation_at_level(gains, level)
}

/// Finds the level whose water-filling rate equals `target_rate` nats.
///
/// A zero target gives the floor level `1/alpha(1)`.
pub fn inverse_waterfill(gains: &[f64], target_rate: f64) -> LevelAllocation {
    debug_check_gains(gains);
    assert!(
        !gains.is_empty(),
        "inverse_waterfill needs at least one gain"
    );
    if target_rate <= 0.0 {
        return allocation_at_level(gains, floor_level(gains));
    }
    let mut log_sum = 0.0;
    let mut level = floor_level(gains);
    for (m, &a) in gains.iter().enumerate() {
        log_sum += a.ln();
        // m+1 active channels: (m+1) ln L + sum ln alpha = target
        level = ((target_rate - log_sum) / (m + 1) as f64).exp();
        match gains.get(m + 1) {
            Some(&next) if level > 1.0 / next => continue,
            _ => break,
        }
    }
    allocation_at_level(gains, level)
}

/// Merges two descending gain lists into one descending list.
pub fn pooled(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_by(|x, y| y.total_cmp(x));
    out
}
