#![no_std]
extern crate alloc;

pub mod analysis;
pub mod error;
pub mod exact;
pub mod hp;
pub mod oracle;
pub mod series;

pub use error::{Error, Result};
