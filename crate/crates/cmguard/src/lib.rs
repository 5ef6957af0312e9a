//! Host-side tooling around `cmguard-core`: TOML experiment configs, the
//! golden-store / fault-pattern / edge-list file formats, metrics output and
//! the `cmguard` command line.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod output;

pub use error::CliError;
