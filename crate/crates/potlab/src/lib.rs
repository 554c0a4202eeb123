//! Scenario runner for `potlab-core`: configuration, model/measure/domain
//! parsing, and deterministic report bundles.

pub mod bundle;
pub mod config;
pub mod error;
pub mod scenarios;
pub mod spec;

pub use bundle::{emit_plotdata, Bundle};
pub use config::{Config, Scenario};
pub use error::{CliError, Result};
pub use scenarios::run_scenario;
