//! Scenario runner for the two-slit density models: configuration,
//! profile CSVs, summaries and bound checks.

pub mod config;
pub mod error;
pub mod scenario;
pub mod table;

pub use config::{parse_config, Method, ScenarioConfig};
pub use error::{CliError, Result};
pub use scenario::{check_bounds, run_scenario, BoundsReport, RunSummary};
pub use table::Table;
