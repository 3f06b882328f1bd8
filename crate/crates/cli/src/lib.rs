//! Named experiments over the `lentparticle` library, with CSV and JSON reports.

pub mod config;
pub mod experiments;
pub mod registry;
pub mod report;

pub use config::{ConfigError, ExperimentConfig, GridConfig, Params};
pub use experiments::run_experiment;
pub use registry::{find, list_experiments, ExperimentInfo, REGISTRY};
pub use report::{Check, Report};
