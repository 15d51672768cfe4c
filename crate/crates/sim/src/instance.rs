//! Explicit instances for the `single` scenario.
//!
//! Two JSON shapes are accepted. The gains form skips the channel model:
//!
//! ```json
//! {"alpha1": [1.0], "alpha2": [1.0], "r_ma": 1.79, "r_bar_1r": 1.39, "r_bar_2r": 0.69, "pr_max": 6.0}
//! ```
//!
//! The channel form gives the four matrices as rows of `[re, im]` pairs,
//! optionally with source covariances `d1`, `d2` in the same layout. Without
//! covariances the MA-phase optimum is computed.

use std::path::Path;

use serde::Deserialize;
use twr_core::channel::decompose;
use twr_core::ma_phase::{max_ma_strategy, SourceStrategy};
use twr_core::{CMatrix, ChannelSet, Complex, MaRates, SubchannelGains, SystemConfig};

use crate::{SimError, SimResult};

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsInstance {
    pub alpha1: Vec<f64>,
    pub alpha2: Vec<f64>,
    pub r_ma: f64,
    pub r_bar_1r: f64,
    pub r_bar_2r: f64,
    pub pr_max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelsInstance {
    pub h1r: RawMatrix,
    pub h2r: RawMatrix,
    pub hr1: RawMatrix,
    pub hr2: RawMatrix,
    pub d1: Option<RawMatrix>,
    pub d2: Option<RawMatrix>,
    pub pr_max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum InstanceFile {
    Gains(GainsInstance),
    Channels(ChannelsInstance),
}

/// What the relay optimizer needs, plus the configuration it came from.
#[derive(Debug, Clone)]
pub struct ResolvedInstance {
    pub config: SystemConfig,
    pub gains: SubchannelGains,
    pub rates: MaRates,
}

fn matrix(name: &str, raw: &RawMatrix) -> SimResult<CMatrix> {
    let rows = raw.len();
    let cols = raw.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || raw.iter().any(|r| r.len() != cols) {
        return Err(SimError::Config(format!(
            "{name} must be a nonempty rectangular matrix"
        )));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        Complex::new(raw[i][j][0], raw[i][j][1])
    }))
}

pub fn load(path: &Path) -> SimResult<InstanceFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SimError::Runtime(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| SimError::Config(format!("{}: {e}", path.display())))
}

impl InstanceFile {
    /// Budget stored in the file, if any.
    pub fn pr_max(&self) -> Option<f64> {
        match self {
            InstanceFile::Gains(g) => g.pr_max,
            InstanceFile::Channels(c) => c.pr_max,
        }
    }

    /// Builds the optimizer input. Antenna counts in `base` are replaced by
    /// the ones implied by the file.
    pub fn resolve(&self, base: &SystemConfig) -> SimResult<ResolvedInstance> {
        let mut config = base.clone();
        match self {
            InstanceFile::Gains(g) => {
                let gains = SubchannelGains::from_gain_lists(g.alpha1.clone(), g.alpha2.clone())?;
                config.n1 = g.alpha1.len();
                config.n2 = g.alpha2.len();
                config.n_r = g.alpha1.len().max(g.alpha2.len());
                let rates = MaRates {
                    r_ma: g.r_ma,
                    r_bar_1r: g.r_bar_1r,
                    r_bar_2r: g.r_bar_2r,
                };
                Ok(ResolvedInstance {
                    config,
                    gains,
                    rates,
                })
            }
            InstanceFile::Channels(c) => {
                let channels = ChannelSet {
                    h1r: matrix("h1r", &c.h1r)?,
                    h2r: matrix("h2r", &c.h2r)?,
                    hr1: matrix("hr1", &c.hr1)?,
                    hr2: matrix("hr2", &c.hr2)?,
                };
                config.n_r = channels.h1r.nrows();
                config.n1 = channels.h1r.ncols();
                config.n2 = channels.h2r.ncols();
                channels.check_dims(&config)?;
                let strategy = match (&c.d1, &c.d2) {
                    (Some(d1), Some(d2)) => SourceStrategy::new(
                        matrix("d1", d1)?,
                        matrix("d2", d2)?,
                        &channels,
                        config.sigmar_sq,
                    )?,
                    (None, None) => max_ma_strategy(&channels, &config)?,
                    _ => return Err(SimError::Config("give both d1 and d2 or neither".into())),
                };
                let gains = decompose(&channels, &config)?;
                Ok(ResolvedInstance {
                    config,
                    gains,
                    rates: strategy.rates,
                })
            }
        }
    }
}
