//! Command-line companion of `coldamp-core`: parameter files, CSV reports,
//! parallel sweeps and the verification suite.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod parallel;
pub mod report;
pub mod verify;

pub use config::{dump_config, load_config, parse_config, Config, ConfigError};
