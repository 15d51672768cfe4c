use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use twr_core::channel::{decompose, generate_channels};
use twr_core::oracle::{baseline_full_power, grid_certify};
use twr_core::relay_opt::optimize;
use twr_core::trial::{prepare_trial, PreparedTrial};
use twr_core::waterfill::{forward_waterfill, pooled, power_of_level, rate_of_level};
use twr_core::{Error, Node, SubchannelGains, SystemConfig};

use crate::instance;
use crate::output::rounded;
use crate::records::{CellAggregate, CurvePoint, RunSummary, TrialRecord};
use crate::spec::{ScenarioKind, ScenarioSpec};
use crate::stats::{bootstrap_ci, mean};
use crate::{SimError, SimResult};

/// Points per fixed-budget split curve.
pub const CURVE_POINTS: usize = 201;

/// Scenario output ready for serialization, floats already rounded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: Value,
    pub records: Vec<Value>,
    pub aggregates: Vec<Value>,
}

fn values<T: Serialize>(rows: &[T]) -> Vec<Value> {
    rows.iter().map(rounded).collect()
}

pub fn run(spec: &ScenarioSpec) -> SimResult<Report> {
    let (records, aggregates) = match spec.scenario {
        ScenarioKind::Lemma2Sweep => {
            let (points, summary) = run_lemma2_sweep(spec)?;
            (values(&points), values(&[summary]))
        }
        ScenarioKind::PrmaxSweep => {
            let (records, summary) = run_prmax_sweep(spec)?;
            (values(&records), values(&[summary]))
        }
        ScenarioKind::AsymmetryStudy => {
            let (records, cells) = run_asymmetry_study(spec)?;
            (values(&records), values(&cells))
        }
        ScenarioKind::Single => {
            let record = run_single(spec)?;
            let summary = RunSummary {
                trials: 1,
                skipped: 0,
                rows: 1,
            };
            (values(&[record]), values(&[summary]))
        }
    };
    Ok(Report {
        config: rounded(spec),
        records,
        aggregates,
    })
}

/// Maps `f` over `0..n`, in parallel unless `serial`; output keeps index order.
fn map_indices<T, F>(n: usize, serial: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if serial {
        (0..n).map(f).collect()
    } else {
        (0..n).into_par_iter().map(f).collect()
    }
}

/// Degenerate draws are skipped rather than failing the run.
fn skippable(e: &Error) -> bool {
    matches!(e, Error::RankZero { .. } | Error::NoConvergence { .. })
}

fn prepare(config: &SystemConfig, trial: u64) -> SimResult<Option<PreparedTrial>> {
    match prepare_trial(config, trial) {
        Ok(p) => Ok(Some(p)),
        Err(e) if skippable(&e) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn split_curve(
    gains: &SubchannelGains,
    budget: f64,
    grid: &[f64],
    trial: u64,
    ratio_db: f64,
) -> Vec<CurvePoint> {
    let a1 = gains.alpha(Node::One);
    let a2 = gains.alpha(Node::Two);
    let peak = forward_waterfill(&pooled(a1, a2), budget);
    grid.iter()
        .filter(|&&l1| power_of_level(a1, l1) <= budget)
        .map(|&l1| {
            let other = forward_waterfill(a2, budget - power_of_level(a1, l1));
            let r1 = rate_of_level(a1, l1);
            CurvePoint {
                trial,
                ratio_db,
                pr_max: budget,
                level1: l1,
                level2: other.level,
                bc_rate_1: r1,
                bc_rate_2: other.rate,
                bc_sum: r1 + other.rate,
                peak_level: peak.level,
                peak_bc_sum: peak.rate,
            }
        })
        .collect()
}

/// BC sum-rate along fixed-budget splits of the relay power, one curve per
/// relay SNR. All curves of a trial share one grid of direction-1 levels.
pub fn run_lemma2_sweep(spec: &ScenarioSpec) -> SimResult<(Vec<CurvePoint>, RunSummary)> {
    let cfg = &spec.system;
    let ratios = spec.sweep.values();
    let budgets: Vec<f64> = ratios
        .iter()
        .map(|db| cfg.sigmar_sq * 10f64.powf(db / 10.0))
        .collect();
    let top = budgets.iter().copied().fold(0.0, f64::max);
    let per_trial = map_indices(
        spec.trials,
        spec.serial,
        |t| -> SimResult<Option<Vec<CurvePoint>>> {
            let channels = generate_channels(cfg, t as u64);
            let gains = match decompose(&channels, cfg) {
                Ok(g) => g,
                Err(e) if skippable(&e) => return Ok(None),
                Err(e) => return Err(e.into()),
            };
            let a1 = gains.alpha(Node::One);
            let lo = 1.0 / a1[0];
            let hi = forward_waterfill(a1, top).level;
            let grid: Vec<f64> = (0..CURVE_POINTS)
                .map(|k| lo + (hi - lo) * k as f64 / (CURVE_POINTS - 1) as f64)
                .collect();
            Ok(Some(
                ratios
                    .iter()
                    .zip(&budgets)
                    .flat_map(|(&db, &budget)| split_curve(&gains, budget, &grid, t as u64, db))
                    .collect(),
            ))
        },
    );
    collect_rows(spec.trials, per_trial)
}

fn collect_rows<T>(
    trials: usize,
    per_trial: Vec<SimResult<Option<Vec<T>>>>,
) -> SimResult<(Vec<T>, RunSummary)> {
    let mut rows = Vec::new();
    let mut skipped = 0;
    for r in per_trial {
        match r? {
            Some(mut v) => rows.append(&mut v),
            None => skipped += 1,
        }
    }
    let summary = RunSummary {
        trials,
        skipped,
        rows: rows.len(),
    };
    Ok((rows, summary))
}

fn solve_record(
    prepared: &PreparedTrial,
    config: &SystemConfig,
    trial: u64,
    spec: &ScenarioSpec,
    with_baseline: bool,
) -> SimResult<TrialRecord> {
    let rates = &prepared.strategy.rates;
    let sol = optimize(&prepared.gains, rates, config.pr_max)?;
    let mut record = TrialRecord::new(trial, config, rates, &sol);
    if with_baseline {
        record = record.with_baseline(&baseline_full_power(
            &prepared.gains,
            rates,
            config.pr_max,
            spec.grid_resolution,
        ));
    }
    if spec.certify {
        record = record.with_oracle(&grid_certify(
            &prepared.gains,
            rates,
            config.pr_max,
            spec.grid_resolution,
        ));
    }
    Ok(record)
}

/// Minimum-power solution next to the full-power baseline over a sweep of
/// relay budgets, on one channel draw per trial.
pub fn run_prmax_sweep(spec: &ScenarioSpec) -> SimResult<(Vec<TrialRecord>, RunSummary)> {
    let budgets = spec.sweep.values();
    let per_trial = map_indices(
        spec.trials,
        spec.serial,
        |t| -> SimResult<Option<Vec<TrialRecord>>> {
            let Some(prepared) = prepare(&spec.system, t as u64)? else {
                return Ok(None);
            };
            budgets
                .iter()
                .map(|&pr| {
                    let config = SystemConfig {
                        pr_max: pr,
                        ..spec.system.clone()
                    };
                    solve_record(&prepared, &config, t as u64, spec, true)
                })
                .collect::<SimResult<Vec<_>>>()
                .map(Some)
        },
    );
    collect_rows(spec.trials, per_trial)
}

/// Cells of the asymmetry study: every antenna split with at least one
/// antenna per source, times the power differences of the sweep.
pub fn asymmetry_cells(spec: &ScenarioSpec) -> Vec<SystemConfig> {
    let n_total = spec.system.n1 + spec.system.n2;
    let p_total = spec.system.p1_max + spec.system.p2_max;
    let mut cells = Vec::new();
    for n1 in 1..n_total {
        for dp in spec.sweep.values() {
            cells.push(SystemConfig {
                n1,
                n2: n_total - n1,
                p1_max: (p_total + dp) / 2.0,
                p2_max: (p_total - dp) / 2.0,
                ..spec.system.clone()
            });
        }
    }
    cells
}

fn aggregate(
    cell: &SystemConfig,
    records: &[TrialRecord],
    trials: usize,
    seed: u64,
) -> CellAggregate {
    let rates: Vec<f64> = records.iter().map(|r| r.sum_rate_tw).collect();
    let eff: Vec<f64> = records
        .iter()
        .map(|r| if r.efficient { 1.0 } else { 0.0 })
        .collect();
    let waste: Vec<f64> = records
        .iter()
        .map(|r| if r.source_waste { 1.0 } else { 0.0 })
        .collect();
    let power: Vec<f64> = records.iter().map(|r| r.consumed_power).collect();
    let (r_lo, r_hi) = bootstrap_ci(&rates, seed);
    let (e_lo, e_hi) = bootstrap_ci(&eff, seed ^ 0x5eed);
    CellAggregate {
        n1: cell.n1,
        n2: cell.n2,
        p1_max: cell.p1_max,
        p2_max: cell.p2_max,
        delta_n: cell.n1 as i64 - cell.n2 as i64,
        delta_p: cell.p1_max - cell.p2_max,
        trials,
        skipped: trials - records.len(),
        mean_sum_rate_tw: mean(&rates),
        sum_rate_ci_lo: r_lo,
        sum_rate_ci_hi: r_hi,
        mean_consumed_power: mean(&power),
        efficient_fraction: mean(&eff),
        efficient_ci_lo: e_lo,
        efficient_ci_hi: e_hi,
        waste_fraction: mean(&waste),
    }
}

pub fn run_asymmetry_study(
    spec: &ScenarioSpec,
) -> SimResult<(Vec<TrialRecord>, Vec<CellAggregate>)> {
    let cells = asymmetry_cells(spec);
    let n = spec.trials;
    let flat = map_indices(
        cells.len() * n,
        spec.serial,
        |k| -> SimResult<Option<TrialRecord>> {
            let (cell, t) = (&cells[k / n], (k % n) as u64);
            match prepare(cell, t)? {
                Some(p) => solve_record(&p, cell, t, spec, false).map(Some),
                None => Ok(None),
            }
        },
    );
    let mut records = Vec::with_capacity(flat.len());
    let mut aggregates = Vec::with_capacity(cells.len());
    for (c, chunk) in flat.chunks(n).enumerate() {
        let mut cell_records = Vec::with_capacity(n);
        for r in chunk {
            if let Some(rec) = r.as_ref().map_err(|e| SimError::Runtime(e.to_string()))? {
                cell_records.push(rec.clone());
            }
        }
        aggregates.push(aggregate(
            &cells[c],
            &cell_records,
            n,
            spec.system.seed.wrapping_add(c as u64),
        ));
        records.extend(cell_records);
    }
    Ok((records, aggregates))
}

/// One instance with the full-power baseline and grid certification attached.
pub fn run_single(spec: &ScenarioSpec) -> SimResult<TrialRecord> {
    let mut certified = spec.clone();
    certified.certify = true;
    let (config, gains, rates) = match &spec.instance {
        Some(path) => {
            let file = instance::load(path)?;
            let mut base = spec.system.clone();
            if !spec.pr_given {
                base.pr_max = file.pr_max().unwrap_or(base.pr_max);
            }
            let r = file.resolve(&base)?;
            (r.config, r.gains, r.rates)
        }
        None => {
            let p = prepare_trial(&spec.system, 0)?;
            (spec.system.clone(), p.gains, p.strategy.rates)
        }
    };
    let sol = optimize(&gains, &rates, config.pr_max)?;
    Ok(TrialRecord::new(0, &config, &rates, &sol)
        .with_baseline(&baseline_full_power(
            &gains,
            &rates,
            config.pr_max,
            spec.grid_resolution,
        ))
        .with_oracle(&grid_certify(
            &gains,
            &rates,
            config.pr_max,
            spec.grid_resolution,
        )))
}
