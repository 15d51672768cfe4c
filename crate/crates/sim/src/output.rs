//! CSV and JSON writers.
//!
//! Floats are rounded to 12 significant digits before serialization, so the
//! two formats carry the same numbers. CSV columns follow the field order of
//! the record types in [`crate::records`].

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::scenarios::Report;
use crate::spec::{OutputFormat, ScenarioSpec};
use crate::{SimError, SimResult};

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// JSON value of `row` with every float rounded.
pub fn rounded<T: Serialize + ?Sized>(row: &T) -> Value {
    let mut v = serde_json::to_value(row).expect("records serialize");
    round_value(&mut v);
    v
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Writes object rows as CSV with a header taken from the first row.
pub fn write_csv<W: Write>(rows: &[Value], out: W) -> SimResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| SimError::Runtime(e.to_string());
    if let Some(Value::Object(first)) = rows.first() {
        w.write_record(first.keys()).map_err(csv_err)?;
        for row in rows {
            let Value::Object(map) = row else {
                return Err(SimError::Runtime("record is not an object".into()));
            };
            w.write_record(map.values().map(cell)).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `results.csv` -> `results.aggregates.csv`.
pub fn aggregates_path(out: &Path) -> PathBuf {
    out.with_extension("aggregates.csv")
}

fn timestamp_line() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    format!("# generated at unix time {secs}\n")
}

fn render_csv(rows: &[Value], deterministic: bool) -> SimResult<Vec<u8>> {
    let mut buf = Vec::new();
    if !deterministic {
        buf.extend_from_slice(timestamp_line().as_bytes());
    }
    write_csv(rows, &mut buf)?;
    Ok(buf)
}

/// Writes `report` where `spec` says. CSV aggregates go to a sibling file,
/// or after a blank line when writing to stdout.
pub fn emit(report: &Report, spec: &ScenarioSpec) -> SimResult<()> {
    let records = match spec.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| SimError::Runtime(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
        OutputFormat::Csv => render_csv(&report.records, spec.deterministic)?,
    };
    let aggregates = match spec.format {
        OutputFormat::Csv => Some(render_csv(&report.aggregates, spec.deterministic)?),
        OutputFormat::Json => None,
    };
    match &spec.out {
        Some(path) => {
            std::fs::write(path, records)?;
            if let Some(a) = aggregates {
                std::fs::write(aggregates_path(path), a)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&records)?;
            if let Some(a) = aggregates {
                stdout.write_all(b"\n")?;
                stdout.write_all(&a)?;
            }
        }
    }
    Ok(())
}
