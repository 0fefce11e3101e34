//! Study files, runs and artifacts for the `prismopt` command line.
//!
//! A study is a TOML file (see [`config`]) that selects topology
//! optimization of the plane beam domain or multi-objective sizing of one
//! sandwich core type. [`run_study`] executes it and writes its artifacts
//! next to a `manifest.json` from which the run can be repeated.

pub mod artifacts;
pub mod config;
pub mod plot;
pub mod study;

pub use config::{ConfigError, ConfigErrors, StudyConfig};
pub use study::{export, run_study, Manifest, RunOptions, Status, StudyReport};
