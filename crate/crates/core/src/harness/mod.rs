//! Scenario configuration, presets, run orchestration and file outputs.

mod check;
mod config;
mod run;
mod scenario;
mod sweep;

pub use check::{poincare_suite, run_checks, BoundSuite, CheckReport, PoincareSuite, ProfileSuite};
pub use config::{
    parse_config, preset, BumpSpec, GasSection, GridSection, OutputSection, PerturbationSection,
    ScenarioConfig, ShiftSection, ShockSection, TimeSection, DEFAULT_BUMP, DEFAULT_DX,
    PRESET_NAMES,
};
pub use run::{run_scenario, OracleReport, R1Summary, RunOutcome, RunReport};
pub use scenario::Scenario;
pub use sweep::{set_key, sweep, SweepEntry};

use thiserror::Error;

use crate::diagnostics::DiagnosticsError;
use crate::gas::GasError;
use crate::profile::ProfileError;
use crate::shift::ShiftError;
use crate::solver::SolverError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("unknown preset `{0}`; expected one of {PRESET_NAMES:?}")]
    UnknownPreset(String),
    #[error(transparent)]
    Gas(#[from] GasError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing json: {0}")]
    Json(#[from] serde_json::Error),
}
