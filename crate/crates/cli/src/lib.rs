//! Scenario-driven front end for the satellite QKD planner.
//!
//! A run reads a TOML scenario, computes the reports of one command and
//! writes each as a CSV or JSON file of flat rows.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{run_command, write_reports, Command};
pub use config::{parse_scenario, parse_scenario_str, OutputFormat, ScenarioConfig};
pub use error::{CliError, ErrorKind};
pub use report::{Report, ReportData};
