use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use twr_core::SystemConfig;

use crate::{SimError, SimResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// BC sum-rate along fixed-budget splits, one curve per relay SNR in dB.
    Lemma2Sweep,
    /// Minimum-power and full-power solutions over a relay-budget sweep.
    PrmaxSweep,
    /// Average rate and efficiency over antenna and power splits.
    AsymmetryStudy,
    /// One instance with grid certification.
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Command-line flags. Unset values fall back to per-scenario defaults.
#[derive(Debug, Clone, Parser)]
#[command(
    name = "twr-sim",
    version,
    about = "Two-way relay power allocation experiments",
    allow_negative_numbers = true
)]
pub struct Cli {
    #[arg(long, value_enum)]
    pub scenario: ScenarioKind,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Channel draws; the asymmetry study runs this many per cell.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    #[arg(long)]
    pub nr: Option<usize>,
    /// Source 1 power budget (W).
    #[arg(long)]
    pub p1: Option<f64>,
    /// Source 2 power budget (W).
    #[arg(long)]
    pub p2: Option<f64>,
    /// Relay power budget (W).
    #[arg(long)]
    pub pr: Option<f64>,
    /// Noise variance, common to all nodes.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Sweep start: relay SNR in dB (lemma2-sweep), relay budget in W
    /// (prmax-sweep) or P1 - P2 in W (asymmetry-study).
    #[arg(long)]
    pub sweep_start: Option<f64>,
    #[arg(long)]
    pub sweep_stop: Option<f64>,
    #[arg(long)]
    pub sweep_points: Option<usize>,
    /// Attach the grid oracle to every solved instance.
    #[arg(long)]
    pub certify: bool,
    /// Level spacing of the oracle grid and the full-power baseline scan (W).
    #[arg(long, default_value_t = 1e-3)]
    pub grid_resolution: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp line from CSV output.
    #[arg(long)]
    pub deterministic: bool,
    /// JSON instance for `single`: explicit gains and rates, or channel matrices.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Run trials on one thread.
    #[arg(long)]
    pub serial: bool,
}

/// Evenly spaced sweep grid, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| self.start + k as f64 * step)
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioSpec {
    pub scenario: ScenarioKind,
    pub system: SystemConfig,
    pub trials: usize,
    pub sweep: Sweep,
    pub certify: bool,
    pub grid_resolution: f64,
    pub format: OutputFormat,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub deterministic: bool,
    #[serde(skip)]
    pub serial: bool,
    #[serde(skip)]
    pub instance: Option<PathBuf>,
    /// Whether `--pr` was given, so an instance file's budget yields to it.
    #[serde(skip)]
    pub pr_given: bool,
}

struct Defaults {
    n: (usize, usize, usize),
    p: (f64, f64, f64),
    trials: usize,
    sweep: (f64, f64, usize),
}

fn defaults(kind: ScenarioKind) -> Defaults {
    match kind {
        ScenarioKind::Lemma2Sweep => Defaults {
            n: (6, 5, 8),
            p: (3.0, 3.0, 3.0),
            trials: 1,
            sweep: (4.0, 7.0, 4),
        },
        ScenarioKind::PrmaxSweep => Defaults {
            n: (6, 5, 8),
            p: (3.0, 3.0, 3.0),
            trials: 1,
            sweep: (0.1, 10.0, 50),
        },
        // n1 + n2 and p1 + p2 are the totals split across cells
        ScenarioKind::AsymmetryStudy => Defaults {
            n: (3, 3, 6),
            p: (2.5, 2.5, 3.0),
            trials: 1000,
            sweep: (-4.0, 4.0, 5),
        },
        ScenarioKind::Single => Defaults {
            n: (2, 2, 2),
            p: (1.0, 1.0, 3.0),
            trials: 1,
            sweep: (0.0, 0.0, 1),
        },
    }
}

impl ScenarioSpec {
    pub fn from_cli(cli: &Cli) -> SimResult<Self> {
        let d = defaults(cli.scenario);
        let system = SystemConfig::uniform_noise(
            (
                cli.n1.unwrap_or(d.n.0),
                cli.n2.unwrap_or(d.n.1),
                cli.nr.unwrap_or(d.n.2),
            ),
            (
                cli.p1.unwrap_or(d.p.0),
                cli.p2.unwrap_or(d.p.1),
                cli.pr.unwrap_or(d.p.2),
            ),
            cli.sigma.unwrap_or(1.0),
            cli.seed,
        );
        let spec = ScenarioSpec {
            scenario: cli.scenario,
            system,
            trials: cli.trials.unwrap_or(d.trials),
            sweep: Sweep {
                start: cli.sweep_start.unwrap_or(d.sweep.0),
                stop: cli.sweep_stop.unwrap_or(d.sweep.1),
                points: cli.sweep_points.unwrap_or(d.sweep.2),
            },
            certify: cli.certify,
            grid_resolution: cli.grid_resolution,
            format: cli.format,
            out: cli.out.clone(),
            deterministic: cli.deterministic,
            serial: cli.serial,
            instance: cli.instance.clone(),
            pr_given: cli.pr.is_some(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Spec with defaults for `kind` and the given seed.
    pub fn with_defaults(kind: ScenarioKind, seed: u64) -> Self {
        let cli = Cli::parse_from([
            "twr-sim",
            "--scenario",
            kind.to_possible_value().unwrap().get_name(),
        ]);
        let mut spec = ScenarioSpec::from_cli(&cli).expect("defaults are valid");
        spec.system.seed = seed;
        spec
    }

    pub fn validate(&self) -> SimResult<()> {
        self.system.validate()?;
        let bad = |msg: &str| Err(SimError::Config(msg.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.sweep.points == 0 {
            return bad("sweep needs at least one point");
        }
        if !(self.sweep.start.is_finite() && self.sweep.stop.is_finite())
            || self.sweep.stop < self.sweep.start
        {
            return bad("sweep stop must be finite and not below start");
        }
        if !(self.grid_resolution > 0.0 && self.grid_resolution.is_finite()) {
            return bad("grid resolution must be positive");
        }
        match self.scenario {
            ScenarioKind::PrmaxSweep if self.sweep.start < 0.0 => {
                bad("relay budgets must be nonnegative")
            }
            ScenarioKind::AsymmetryStudy => {
                let total_p = self.system.p1_max + self.system.p2_max;
                if self.system.n1 + self.system.n2 < 2 {
                    return bad("asymmetry study needs n1 + n2 >= 2");
                }
                if self.sweep.start < -total_p || self.sweep.stop > total_p {
                    return bad("power differences must lie within +-(p1 + p2)");
                }
                Ok(())
            }
            ScenarioKind::Single if self.instance.is_none() && self.trials != 1 => {
                bad("single runs exactly one trial")
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_values_inclusive() {
        let s = Sweep {
            start: 4.0,
            stop: 7.0,
            points: 4,
        };
        assert_eq!(s.values(), vec![4.0, 5.0, 6.0, 7.0]);
        assert_eq!(
            Sweep {
                start: 2.0,
                stop: 9.0,
                points: 1
            }
            .values(),
            vec![2.0]
        );
    }

    #[test]
    fn scenario_defaults() {
        let s = ScenarioSpec::with_defaults(ScenarioKind::PrmaxSweep, 5);
        assert_eq!((s.system.n1, s.system.n2, s.system.n_r), (6, 5, 8));
        assert_eq!(s.sweep.points, 50);
        assert_eq!(s.system.seed, 5);
        let a = ScenarioSpec::with_defaults(ScenarioKind::AsymmetryStudy, 1);
        assert_eq!(a.trials, 1000);
        assert_eq!(a.system.n_r, 6);
    }

    #[test]
    fn rejects_bad_specs() {
        let parse = |args: &[&str]| {
            let mut full = vec!["twr-sim"];
            full.extend_from_slice(args);
            ScenarioSpec::from_cli(&Cli::parse_from(full))
        };
        assert!(matches!(
            parse(&["--scenario", "prmax-sweep", "--trials", "0"]),
            Err(SimError::Config(_))
        ));
        assert!(matches!(
            parse(&["--scenario", "prmax-sweep", "--sweep-points", "0"]),
            Err(SimError::Config(_))
        ));
        assert!(matches!(
            parse(&["--scenario", "prmax-sweep", "--sigma", "-1"]),
            Err(SimError::Config(_))
        ));
        assert!(matches!(
            parse(&["--scenario", "asymmetry-study", "--sweep-stop", "9"]),
            Err(SimError::Config(_))
        ));
        assert!(parse(&["--scenario", "single"]).is_ok());
    }
}
