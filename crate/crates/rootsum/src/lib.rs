//! Command-line tool, output formats and parallel sweeps on top of
//! `rootsum-core`.

pub mod cli;
pub mod config;
pub mod formats;
pub mod numparse;
pub mod parallel;

pub use rootsum_core as core;
