//! One Monte-Carlo draw taken through channel generation, the MA phase and
//! the relay decomposition.

use crate::channel::{decompose, generate_channels, ChannelSet, SubchannelGains, SystemConfig};
use crate::error::Result;
use crate::ma_phase::{max_ma_strategy, SourceStrategy};
use crate::relay_opt::{optimize, RelaySolution};

#[derive(Debug, Clone)]
pub struct PreparedTrial {
    pub channels: ChannelSet,
    pub strategy: SourceStrategy,
    pub gains: SubchannelGains,
}

impl PreparedTrial {
    pub fn solve(&self, pr_max: f64) -> Result<RelaySolution> {
        optimize(&self.gains, &self.strategy.rates, pr_max)
    }
}

/// Draws trial `trial_index` and computes everything that does not depend on
/// the relay budget.
pub fn prepare_trial(config: &SystemConfig, trial_index: u64) -> Result<PreparedTrial> {
    config.validate()?;
    let channels = generate_channels(config, trial_index);
    let strategy = max_ma_strategy(&channels, config)?;
    let gains = decompose(&channels, config)?;
    Ok(PreparedTrial {
        channels,
        strategy,
        gains,
    })
}
