//! Scenario runner for the two-way relay allocator.
//!
//! Each scenario turns a [`ScenarioSpec`] into typed records; [`run`] wraps
//! them into a [`Report`] that [`output`] writes as CSV or JSON.

pub mod instance;
pub mod output;
pub mod records;
pub mod scenarios;
pub mod spec;
pub mod stats;

pub use records::{CellAggregate, CurvePoint, RunSummary, TrialRecord};
pub use scenarios::{
    run, run_asymmetry_study, run_lemma2_sweep, run_prmax_sweep, run_single, Report,
};
pub use spec::{Cli, OutputFormat, ScenarioKind, ScenarioSpec, Sweep};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl SimError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) => 2,
            SimError::Runtime(_) => 3,
        }
    }
}

impl From<twr_core::Error> for SimError {
    fn from(e: twr_core::Error) -> Self {
        match e {
            twr_core::Error::InvalidConfig(msg) => SimError::Config(msg),
            other => SimError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Runtime(e.to_string())
    }
}

pub type SimResult<T> = std::result::Result<T, SimError>;
