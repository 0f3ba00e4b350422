//! Optimal verification of GHZ and GHZ-like states with local measurements.

pub mod analysis;
pub mod check;
pub mod error;
pub mod linalg;
pub mod measurements;
pub mod reports;
pub mod simulator;
pub mod states;
pub mod strategies;

pub use error::{Error, Result};
