//! Configuration, experiment commands, validation and output files.

pub mod commands;
pub mod config;
pub mod output;
pub mod validation;

pub use config::ExperimentConfig;
pub use validation::{run_all, ValidationOptions, ValidationReport};
