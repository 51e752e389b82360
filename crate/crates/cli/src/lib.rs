//! Batch front-end for the `xyz-gaudin` crate: configuration, commands,
//! verification suites and result records.

pub mod commands;
pub mod config;
pub mod pipeline;
pub mod record;
pub mod suites;

pub use commands::{cmd_bethe, cmd_spectrum, cmd_verify, Outcome};
pub use config::{ConfigError, Job};

/// Exit code for an invalid configuration.
pub const EXIT_CONFIG: i32 = 4;
