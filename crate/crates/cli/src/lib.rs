//! Config-driven experiment runner around the `quasifix` solvers.
//!
//! One JSON config describes a norm, a map and a mode; [`run`] executes it
//! and writes `trace.csv` plus `result.json` (solve modes), `report.json`
//! (estimate, verify_norm) or `diagnostic.json` (failures).

pub mod catalog;
pub mod config;
pub mod error;
mod run;

pub use catalog::list_catalog;
pub use config::{ExperimentConfig, Mode, ParamsConfig, StartPoint};
pub use error::RunError;
pub use run::{
    run, run_config, verify_report, EstimateReport, Outcome, ParamsSource, ResultFile,
    SeriesSummary, Summary, VerifyReport, DIAGNOSTIC_FILE, REPORT_FILE, RESULT_FILE, SERIES_LISTS,
    SERIES_MAX_LEN, TRACE_FILE,
};
