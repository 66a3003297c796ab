//! File formats, commands, the scoring service and a synthetic corpus
//! generator on top of `applause-core`.

pub mod commands;
pub mod config;
pub mod data;
pub mod formats;
pub mod server;
pub mod synth;

pub use config::{Config, ConfigError};
