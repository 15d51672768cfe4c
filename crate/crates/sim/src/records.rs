//! Output rows. Field order is the column order of the CSV output.

use serde::Serialize;
use twr_core::oracle::{Baseline, OracleResult};
use twr_core::{MaRates, RelaySolution, SystemConfig};

/// One solved instance. Rates are in nats; `sum_rate_tw` carries the 1/2
/// factor, the BC and MA rates do not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub n1: usize,
    pub n2: usize,
    pub nr: usize,
    pub p1_max: f64,
    pub p2_max: f64,
    pub pr_max: f64,
    pub sigma_sq: f64,
    pub r_ma: f64,
    pub r_bar_1r: f64,
    pub r_bar_2r: f64,
    pub level1: f64,
    pub level2: f64,
    pub consumed_power: f64,
    pub bc_rate_1: f64,
    pub bc_rate_2: f64,
    pub bc_sum: f64,
    pub sum_rate_tw: f64,
    pub step_path: String,
    pub efficient: bool,
    pub source_waste: bool,
    pub baseline_level1: Option<f64>,
    pub baseline_level2: Option<f64>,
    pub baseline_power: Option<f64>,
    pub baseline_bc_sum: Option<f64>,
    pub baseline_sum_rate_tw: Option<f64>,
    pub oracle_best_rate: Option<f64>,
    pub oracle_min_power: Option<f64>,
    pub oracle_level1: Option<f64>,
    pub oracle_level2: Option<f64>,
    pub oracle_resolution: Option<f64>,
}

impl TrialRecord {
    pub fn new(trial: u64, config: &SystemConfig, rates: &MaRates, sol: &RelaySolution) -> Self {
        TrialRecord {
            trial,
            n1: config.n1,
            n2: config.n2,
            nr: config.n_r,
            p1_max: config.p1_max,
            p2_max: config.p2_max,
            pr_max: config.pr_max,
            sigma_sq: config.sigmar_sq,
            r_ma: rates.r_ma,
            r_bar_1r: rates.r_bar_1r,
            r_bar_2r: rates.r_bar_2r,
            level1: sol.levels[0],
            level2: sol.levels[1],
            consumed_power: sol.consumed_power,
            bc_rate_1: sol.bc_rates[0],
            bc_rate_2: sol.bc_rates[1],
            bc_sum: sol.bc_sum(),
            sum_rate_tw: sol.sum_rate_tw,
            step_path: sol.step_trace.to_string(),
            efficient: sol.efficient,
            source_waste: sol.source_waste,
            baseline_level1: None,
            baseline_level2: None,
            baseline_power: None,
            baseline_bc_sum: None,
            baseline_sum_rate_tw: None,
            oracle_best_rate: None,
            oracle_min_power: None,
            oracle_level1: None,
            oracle_level2: None,
            oracle_resolution: None,
        }
    }

    pub fn with_baseline(mut self, b: &Baseline) -> Self {
        self.baseline_level1 = Some(b.levels[0]);
        self.baseline_level2 = Some(b.levels[1]);
        self.baseline_power = Some(b.consumed_power);
        self.baseline_bc_sum = Some(b.bc_rates[0] + b.bc_rates[1]);
        self.baseline_sum_rate_tw = Some(b.tw_rate);
        self
    }

    pub fn with_oracle(mut self, o: &OracleResult) -> Self {
        self.oracle_best_rate = Some(o.best_rate);
        self.oracle_min_power = Some(o.min_power_at_best);
        self.oracle_level1 = Some(o.argmax_levels[0]);
        self.oracle_level2 = Some(o.argmax_levels[1]);
        self.oracle_resolution = Some(o.grid_resolution);
        self
    }
}

/// One point of a fixed-budget split curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub trial: u64,
    pub ratio_db: f64,
    pub pr_max: f64,
    pub level1: f64,
    pub level2: f64,
    pub bc_rate_1: f64,
    pub bc_rate_2: f64,
    pub bc_sum: f64,
    /// Pooled full-budget level, where the curve should peak.
    pub peak_level: f64,
    pub peak_bc_sum: f64,
}

/// Per-cell averages of the asymmetry study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellAggregate {
    pub n1: usize,
    pub n2: usize,
    pub p1_max: f64,
    pub p2_max: f64,
    pub delta_n: i64,
    pub delta_p: f64,
    pub trials: usize,
    pub skipped: usize,
    pub mean_sum_rate_tw: f64,
    pub sum_rate_ci_lo: f64,
    pub sum_rate_ci_hi: f64,
    pub mean_consumed_power: f64,
    pub efficient_fraction: f64,
    pub efficient_ci_lo: f64,
    pub efficient_ci_hi: f64,
    pub waste_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub trials: usize,
    pub skipped: usize,
    pub rows: usize,
}
