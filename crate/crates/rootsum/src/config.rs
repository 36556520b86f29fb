//! Run configuration shared by every subcommand.

use rootsum_core::hp::DEFAULT_PRECISION;
use rootsum_core::oracle::DEFAULT_BUDGET;

use crate::formats::OutputFormat;

/// Environment variable that overrides the default precision.
pub const PRECISION_ENV: &str = "ROOTSUM_PRECISION";

pub const MIN_PRECISION: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    /// Fractional bits of every fixed-point value.
    pub precision_bits: u32,
    /// Largest number of oracle iterations a command may run.
    pub oracle_budget: u64,
    pub output_format: OutputFormat,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            precision_bits: DEFAULT_PRECISION,
            oracle_budget: DEFAULT_BUDGET,
            output_format: OutputFormat::Plain,
        }
    }
}

impl Config {
    pub fn new(precision_bits: u32, oracle_budget: u64, output_format: OutputFormat) -> Result<Self, String> {
        if precision_bits < MIN_PRECISION {
            return Err(format!("precision must be at least {MIN_PRECISION} bits, got {precision_bits}"));
        }
        Ok(Config {
            precision_bits,
            oracle_budget,
            output_format,
        })
    }
}
