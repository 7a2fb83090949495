//! Configuration-driven runs: a JSON scenario names a system, an optional
//! block, one construction and its tolerances; a run verifies the
//! construction and writes a JSON report plus any requested CSV files.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or the run
//! hits a numerical failure, 2 for configuration errors.

mod config;
mod expr;
mod run;
mod suite;

pub use config::{
    default_variables, BlockSpec, Construction, GridSpec, Indicator, Outputs, Scenario, Suite,
    SystemSpec, Tolerances, TraceSpec, REPORT_SCHEMA, SCENARIO_SCHEMA, SUITE_SCHEMA,
};
pub use expr::Expr;
pub use run::{
    load_scenario, parse_scenario, run_loaded, trace_scenario, Check, ConfigEcho, Constants,
    RunOptions, RunReport, Verdict,
};
pub use suite::{load_suite, run_suite, SuiteOutcome, SuiteRow};

use std::path::Path;

use crate::error::Error;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("{origin}: {message}")]
    Config { origin: String, message: String },
    #[error(transparent)]
    Run(#[from] Error),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } | Self::Run(Error::Spec(_)) => 2,
            Self::Run(_) => 1,
        }
    }
}

/// Loads, validates and runs a scenario file.
pub fn run_scenario(path: &Path, opts: &RunOptions) -> Result<RunReport, ScenarioError> {
    run_loaded(&load_scenario(path)?, opts)
}

/// Exit code of a finished or failed run.
pub fn exit_code(outcome: &Result<RunReport, ScenarioError>) -> i32 {
    match outcome {
        Ok(r) => r.exit_code(),
        Err(e) => e.exit_code(),
    }
}
