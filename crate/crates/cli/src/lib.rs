//! Command-line front end for composite-indicator importance audits.
//!
//! The binary exposes four subcommands: `audit` runs the full pipeline and
//! writes a JSON report, `invert` recovers the weights that would realize
//! stated importance targets, `plotdata` emits tidy CSV curves for one
//! indicator, and `gen` draws a reproducible synthetic panel. This library
//! half holds the configuration handling, the report schema, and the command
//! implementations so they stay testable without spawning the binary.

pub mod config;
pub mod report;
pub mod run;
