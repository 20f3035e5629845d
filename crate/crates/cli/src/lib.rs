//! File formats, configuration and the scenario pipeline behind the
//! `evortex` command-line tool.

// `!(x > 0.0)` guards are meant to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod field_io;
pub mod images;
pub mod lock;
pub mod manifest;
pub mod pipeline;
pub mod tables;

pub use config::{ConfigErrors, ScenarioConfig};
pub use pipeline::{run, RunOutput};
